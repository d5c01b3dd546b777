// mgtm: multi-grain topic modeling of review corpora with an aspect-rating
// pipeline on top. Subcommands: ingest, train, topics, rank, synth.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mgtm/corpus.hpp"
#include "mgtm/errors.hpp"
#include "mgtm/features.hpp"
#include "mgtm/lda.hpp"
#include "mgtm/mglda.hpp"
#include "mgtm/model_io.hpp"
#include "mgtm/pipeline.hpp"
#include "mgtm/ranker.hpp"
#include "mgtm/synth.hpp"

namespace {

struct TrainOptions {
  std::string corpus_path;
  std::string model_out;
  std::string model = "mglda";
  std::string trace_out;  // default: <model-out>.trace.csv
  mgtm::Hyperparams hyper;
  int lda_k = 40;
  double lda_alpha = 0.1;
  double lda_beta = 0.01;
  int iterations = 800;
  int chains = 1;
  std::uint64_t seed = 1;
};

struct RankOptions {
  std::string corpus_path;
  std::string model_path;
  std::string ranker_out;
  std::string report_out = "-";
  std::string profiles_out;
  std::string features_out;
  bool topic_features = false;
  int samples = 100;
  mgtm::RankExperimentConfig experiment;
};

struct SynthOptions {
  std::string out_path;
  std::string truth_out;
  bool rated = false;
  mgtm::SynthConfig plain;
  mgtm::RatedSynthConfig labeled;
};

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mgtm::DataError("cannot write output file: " + path);
  out << text;
}

int cmd_ingest(const std::string& input, const std::string& stopword_path,
               const std::string& output, int rating_scale) {
  std::unordered_set<std::string> stopwords;
  if (!stopword_path.empty()) stopwords = mgtm::load_stopwords(stopword_path);
  const auto raw = mgtm::load_documents_jsonl(input);
  if (raw.empty()) throw mgtm::DataError(input + ": empty corpus");
  mgtm::IngestReport report;
  const mgtm::Corpus corpus = mgtm::build_corpus(raw, stopwords, rating_scale, &report);
  if (corpus.documents.empty()) throw mgtm::DataError(input + ": empty corpus");
  mgtm::save_corpus(corpus, output);
  std::cout << "documents_kept\t" << report.docs_kept << '\n'
            << "documents_dropped\t" << report.docs_dropped << '\n'
            << "vocabulary_size\t" << report.vocabulary_size << '\n'
            << "tokens\t" << report.tokens << '\n';
  return 0;
}

struct ChainResult {
  double final_log_joint = 0.0;
  std::vector<std::pair<int, double>> trace;
};

void write_trace(const std::string& path, const std::vector<std::pair<int, double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mgtm::DataError("cannot write trace file: " + path);
  out << "sweep,log_joint\n";
  char buf[48];
  for (const auto& [sweep, lj] : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", sweep, lj);
    out << buf;
  }
}

int cmd_train(const TrainOptions& opt) {
  const mgtm::Corpus corpus = mgtm::load_corpus(opt.corpus_path);
  const std::string trace_path =
      opt.trace_out.empty() ? opt.model_out + ".trace.csv" : opt.trace_out;

  if (opt.model == "mglda") {
    std::vector<mgtm::MgldaState> states;
    std::vector<ChainResult> results(opt.chains);
    states.reserve(opt.chains);
    for (int c = 0; c < opt.chains; ++c) {
      states.push_back(mgtm::init_state(corpus, opt.hyper, opt.seed + c));
    }
    {
      std::vector<std::thread> threads;
      for (int c = 0; c < opt.chains; ++c) {
        threads.emplace_back([&, c] {
          auto& trace = results[c].trace;
          mgtm::run_sweeps(states[c], opt.iterations,
                           [&](int sweep, double lj) { trace.emplace_back(sweep, lj); });
          results[c].final_log_joint = mgtm::log_joint(states[c]);
        });
      }
      for (auto& t : threads) t.join();
    }
    int best = 0;
    for (int c = 1; c < opt.chains; ++c) {
      if (results[c].final_log_joint > results[best].final_log_joint) best = c;
    }
    mgtm::save_model(states[best], opt.model_out);
    write_trace(trace_path, results[best].trace);
    std::printf("model\tmglda\nchains\t%d\nbest_chain\t%d\nlog_joint\t%.6f\n",
                opt.chains, best, results[best].final_log_joint);
  } else {
    std::vector<mgtm::LdaState> states;
    std::vector<ChainResult> results(opt.chains);
    states.reserve(opt.chains);
    for (int c = 0; c < opt.chains; ++c) {
      states.push_back(mgtm::lda_init(corpus, opt.lda_k, opt.lda_alpha, opt.lda_beta,
                                      opt.seed + c));
    }
    {
      std::vector<std::thread> threads;
      for (int c = 0; c < opt.chains; ++c) {
        threads.emplace_back([&, c] {
          auto& trace = results[c].trace;
          mgtm::lda_run_sweeps(states[c], opt.iterations,
                               [&](int sweep, double lj) { trace.emplace_back(sweep, lj); });
          results[c].final_log_joint = mgtm::lda_log_joint(states[c]);
        });
      }
      for (auto& t : threads) t.join();
    }
    int best = 0;
    for (int c = 1; c < opt.chains; ++c) {
      if (results[c].final_log_joint > results[best].final_log_joint) best = c;
    }
    mgtm::save_model(states[best], opt.model_out);
    write_trace(trace_path, results[best].trace);
    std::printf("model\tlda\nchains\t%d\nbest_chain\t%d\nlog_joint\t%.6f\n",
                opt.chains, best, results[best].final_log_joint);
  }
  return 0;
}

int cmd_topics(const std::string& model_path, int top_n, const std::string& out_path) {
  write_text(out_path, mgtm::topic_report_from_file(model_path, top_n));
  return 0;
}

int cmd_synth(const SynthOptions& opt) {
  mgtm::SynthOutput out;
  if (opt.rated) {
    out = mgtm::generate_rated(opt.labeled);
  } else {
    out = mgtm::generate_synthetic(opt.plain);
  }
  mgtm::save_documents_jsonl(out.documents, opt.out_path);
  if (!opt.truth_out.empty()) mgtm::save_truth(out, opt.truth_out);
  std::cout << "documents\t" << out.documents.size() << '\n'
            << "vocabulary_size\t" << out.vocabulary.size() << '\n';
  return 0;
}

int cmd_rank(const RankOptions& opt) {
  const mgtm::Corpus corpus = mgtm::load_corpus(opt.corpus_path);
  const std::string kind = mgtm::peek_model_kind(opt.model_path);

  std::vector<std::vector<mgtm::SentenceTopicProfile>> profiles;
  std::string tag;
  if (opt.topic_features || !opt.profiles_out.empty()) {
    if (kind == "mglda") {
      mgtm::MgldaState state = mgtm::load_mglda_model(opt.model_path, corpus);
      profiles = mgtm::resample_all(state, opt.samples, opt.experiment.seed);
      tag = "mg";
    } else {
      mgtm::LdaState state = mgtm::load_lda_model(opt.model_path, corpus);
      profiles = mgtm::resample_all(state, opt.samples, opt.experiment.seed);
      tag = "lda";
    }
  }

  mgtm::RankerModel model;
  mgtm::Bucketizer buckets;
  mgtm::FeatureConfig config;
  const mgtm::RankReport report = mgtm::run_rank_experiment(
      corpus, opt.topic_features ? &profiles : nullptr, tag, opt.experiment, &model,
      &buckets, &config);
  write_text(opt.report_out, mgtm::rank_report_tsv(report));
  if (!opt.ranker_out.empty()) {
    mgtm::save_ranker(model, buckets, config, opt.ranker_out);
  }
  if (!opt.profiles_out.empty()) {
    mgtm::save_profiles_jsonl(profiles, opt.profiles_out);
  }
  if (!opt.features_out.empty()) {
    std::vector<std::size_t> rated;
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
      if (!corpus.documents[d].ratings.empty()) rated.push_back(d);
    }
    std::unordered_set<std::string> trigram_vocab;
    if (config.trigrams) {
      trigram_vocab = mgtm::frequent_trigrams(corpus, rated, opt.experiment.trigram_min_df);
    }
    std::vector<std::vector<std::string>> feats;
    std::vector<std::vector<int>> labels;
    static const std::vector<mgtm::SentenceTopicProfile> empty;
    for (std::size_t d : rated) {
      feats.push_back(mgtm::make_features(corpus.documents[d], corpus.vocabulary,
                                          opt.topic_features ? profiles[d] : empty,
                                          buckets, trigram_vocab, config));
      std::vector<int> row;
      for (const auto& a : model.aspects) row.push_back(corpus.documents[d].ratings.at(a));
      labels.push_back(std::move(row));
    }
    mgtm::save_sparse_features(feats, labels, model.aspects, opt.features_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-grain topic models over review corpora, with per-sentence "
               "topic features and ordinal aspect rating"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_config("--config")->description("TOML-style config file; flags win");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Tokenize JSON-lines reviews into a corpus file");
  std::string in_input, in_stopwords, in_output;
  int in_rating_scale = 5;
  ingest->add_option("--input", in_input, "JSON-lines input, one document per line")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--stopwords", in_stopwords, "stopword list, one term per line")
      ->check(CLI::ExistingFile);
  ingest->add_option("--output", in_output, "corpus file to write")->required();
  ingest->add_option("--rating-scale", in_rating_scale, "ratings must lie in 1..scale")
      ->check(CLI::PositiveNumber);

  // train
  auto* train = app.add_subcommand("train", "Run a collapsed Gibbs chain and save the model");
  TrainOptions topt;
  train->add_option("--corpus", topt.corpus_path)->required()->check(CLI::ExistingFile);
  train->add_option("--model-out", topt.model_out)->required();
  train->add_option("--model", topt.model, "mglda or lda")
      ->check(CLI::IsMember({"mglda", "lda"}));
  train->add_option("--k-global", topt.hyper.k_global)->check(CLI::PositiveNumber);
  train->add_option("--k-local", topt.hyper.k_local)->check(CLI::PositiveNumber);
  train->add_option("--window", topt.hyper.window, "sentences per sliding window")
      ->check(CLI::PositiveNumber);
  train->add_option("--iterations", topt.iterations)->check(CLI::NonNegativeNumber);
  train->add_option("--alpha-gl", topt.hyper.alpha_global)->check(CLI::PositiveNumber);
  train->add_option("--alpha-loc", topt.hyper.alpha_local)->check(CLI::PositiveNumber);
  train->add_option("--alpha-mix-gl", topt.hyper.alpha_mix_global)->check(CLI::PositiveNumber);
  train->add_option("--alpha-mix-loc", topt.hyper.alpha_mix_local)->check(CLI::PositiveNumber);
  train->add_option("--beta-gl", topt.hyper.beta_global)->check(CLI::PositiveNumber);
  train->add_option("--beta-loc", topt.hyper.beta_local)->check(CLI::PositiveNumber);
  train->add_option("--gamma", topt.hyper.gamma)->check(CLI::PositiveNumber);
  train->add_option("--k", topt.lda_k, "topic count (lda)")->check(CLI::PositiveNumber);
  train->add_option("--alpha", topt.lda_alpha, "document prior (lda)")
      ->check(CLI::PositiveNumber);
  train->add_option("--beta", topt.lda_beta, "word prior (lda)")->check(CLI::PositiveNumber);
  train->add_option("--seed", topt.seed);
  train->add_option("--chains", topt.chains, "independent chains; best final log-joint wins")
      ->check(CLI::PositiveNumber);
  train->add_option("--trace-out", topt.trace_out,
                    "per-sweep log-joint CSV (default <model-out>.trace.csv)");

  // topics
  auto* topics = app.add_subcommand("topics", "Write the top words of each topic as TSV");
  std::string tp_model, tp_out = "-";
  int tp_n = 12;
  topics->add_option("--model", tp_model)->required()->check(CLI::ExistingFile);
  topics->add_option("--top-n", tp_n, "words per topic")->check(CLI::PositiveNumber);
  topics->add_option("--topics-out", tp_out, "output path or - for stdout");

  // rank
  auto* rank = app.add_subcommand(
      "rank", "Train and evaluate the ordinal aspect ranker over a rated corpus");
  RankOptions ropt;
  rank->add_option("--corpus", ropt.corpus_path)->required()->check(CLI::ExistingFile);
  rank->add_option("--model", ropt.model_path, "trained topic model")
      ->required()
      ->check(CLI::ExistingFile);
  rank->add_flag("--topic-features", ropt.topic_features,
                 "add per-sentence topic conjunction features");
  rank->add_option("--samples", ropt.samples, "resamples per document")
      ->check(CLI::PositiveNumber);
  rank->add_option("--buckets", ropt.experiment.buckets)->check(CLI::PositiveNumber);
  rank->add_option("--top-k", ropt.experiment.top_k)->check(CLI::PositiveNumber);
  rank->add_option("--epochs", ropt.experiment.epochs)->check(CLI::NonNegativeNumber);
  rank->add_option("--split", ropt.experiment.train_fraction, "training fraction")
      ->check(CLI::Range(0.01, 0.99));
  rank->add_option("--repeats", ropt.experiment.repeats)->check(CLI::PositiveNumber);
  rank->add_option("--rating-levels", ropt.experiment.rating_levels)
      ->check(CLI::Range(2, 100));
  rank->add_option("--ngrams", ropt.experiment.ngram_order, "1 2 or 3")
      ->check(CLI::Range(1, 3));
  rank->add_option("--min-df", ropt.experiment.trigram_min_df,
                   "document frequency cut for trigrams")
      ->check(CLI::PositiveNumber);
  rank->add_option("--seed", ropt.experiment.seed);
  rank->add_option("--ranker-out", ropt.ranker_out, "ranker model file");
  rank->add_option("--report-out", ropt.report_out, "loss table path or - for stdout");
  rank->add_option("--profiles-out", ropt.profiles_out,
                   "per-sentence topic profiles as JSON lines");
  rank->add_option("--features-out", ropt.features_out,
                   "sparse 'label idx:1' files, one per aspect, plus .vocab");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic review corpus");
  SynthOptions sopt;
  sopt.plain.hyper.k_global = 4;
  sopt.plain.hyper.k_local = 3;
  synth->add_option("--out", sopt.out_path, "JSON-lines corpus to write")->required();
  synth->add_option("--truth-out", sopt.truth_out, "ground-truth topic tables");
  synth->add_flag("--rated", sopt.rated, "attach planted aspect ratings");
  synth->add_option("--docs", sopt.plain.documents)->check(CLI::PositiveNumber);
  synth->add_option("--sentences", sopt.plain.sentences_per_doc)->check(CLI::PositiveNumber);
  synth->add_option("--tokens", sopt.plain.tokens_per_sentence)->check(CLI::PositiveNumber);
  synth->add_option("--vocab", sopt.plain.vocab_size)->check(CLI::PositiveNumber);
  synth->add_option("--k-global", sopt.plain.hyper.k_global)->check(CLI::PositiveNumber);
  synth->add_option("--k-local", sopt.plain.hyper.k_local)->check(CLI::PositiveNumber);
  synth->add_option("--window", sopt.plain.hyper.window)->check(CLI::PositiveNumber);
  synth->add_option("--phi-conc", sopt.plain.phi_concentration,
                    "topic-word Dirichlet concentration (small = peaked)")
      ->check(CLI::PositiveNumber);
  synth->add_option("--noise", sopt.labeled.noise, "sentiment flip rate (--rated)")
      ->check(CLI::Range(0.0, 1.0));
  std::uint64_t synth_seed = 1;
  synth->add_option("--seed", synth_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ingest->parsed()) {
      return cmd_ingest(in_input, in_stopwords, in_output, in_rating_scale);
    }
    if (train->parsed()) {
      return cmd_train(topt);
    }
    if (topics->parsed()) {
      return cmd_topics(tp_model, tp_n, tp_out);
    }
    if (rank->parsed()) {
      return cmd_rank(ropt);
    }
    if (synth->parsed()) {
      sopt.plain.seed = synth_seed;
      sopt.labeled.seed = synth_seed;
      if (synth->count("--docs")) sopt.labeled.documents = sopt.plain.documents;
      return cmd_synth(sopt);
    }
  } catch (const mgtm::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
