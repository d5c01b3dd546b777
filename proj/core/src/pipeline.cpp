#include "mgtm/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "mgtm/errors.hpp"
#include "mgtm/rng.hpp"
#include "mgtm/synth.hpp"

namespace mgtm {

namespace {

std::vector<std::string> aspect_order(const Corpus& corpus,
                                      const std::vector<std::size_t>& rated) {
  std::vector<std::string> aspects;
  for (const auto& [name, _] : corpus.documents[rated.front()].ratings) {
    aspects.push_back(name);
  }
  for (std::size_t d : rated) {
    const auto& ratings = corpus.documents[d].ratings;
    if (ratings.size() != aspects.size() ||
        !std::all_of(aspects.begin(), aspects.end(),
                     [&](const std::string& a) { return ratings.count(a) > 0; })) {
      throw DataError("document " + corpus.documents[d].id +
                      " does not carry the corpus-wide aspect set");
    }
  }
  // Use the conventional reporting order when the aspect set matches it.
  const auto& canonical = rated_aspects();
  if (aspects.size() == canonical.size()) {
    std::vector<std::string> sorted_canonical = canonical;
    std::sort(sorted_canonical.begin(), sorted_canonical.end());
    if (aspects == sorted_canonical) return canonical;
  }
  return aspects;
}

struct EvalCounts {
  std::vector<std::vector<int>> actual;     // [aspect][instance]
  std::vector<std::vector<int>> predicted;
};

std::vector<double> per_aspect_loss(const EvalCounts& ev) {
  std::vector<double> out(ev.actual.size());
  for (std::size_t a = 0; a < ev.actual.size(); ++a) {
    out[a] = ranking_loss(ev.actual[a], ev.predicted[a]);
  }
  return out;
}

}  // namespace

RankReport run_rank_experiment(
    const Corpus& corpus,
    const std::vector<std::vector<SentenceTopicProfile>>* profiles,
    const std::string& model_tag, const RankExperimentConfig& config,
    RankerModel* trained_model, Bucketizer* used_buckets, FeatureConfig* used_config) {
  std::vector<std::size_t> rated;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    if (!corpus.documents[d].ratings.empty()) rated.push_back(d);
  }
  if (rated.empty()) throw DataError("corpus has no aspect ratings");
  if (rated.size() < 2) throw DataError("need at least two rated documents to split");
  if (profiles && profiles->size() != corpus.documents.size()) {
    throw DataError("profiles do not cover the corpus");
  }

  const std::vector<std::string> aspects = aspect_order(corpus, rated);
  const std::size_t n_aspects = aspects.size();
  const bool with_topics = profiles != nullptr;

  FeatureConfig base_cfg;
  base_cfg.unigrams = config.ngram_order >= 1;
  base_cfg.bigrams = config.ngram_order >= 2;
  base_cfg.trigrams = config.ngram_order >= 3;
  base_cfg.top_k = config.top_k;
  FeatureConfig topic_cfg = base_cfg;
  topic_cfg.model_tag = model_tag;

  const int n_variants = with_topics ? 2 : 1;  // PRank, PRank+<tag>
  std::vector<std::vector<double>> loss_sum(1 + n_variants,
                                            std::vector<double>(n_aspects, 0.0));

  for (int rep = 0; rep < config.repeats; ++rep) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(rep)));
    std::vector<std::size_t> order = rated;
    rng.shuffle(order);
    std::size_t train_n =
        static_cast<std::size_t>(config.train_fraction * static_cast<double>(order.size()));
    train_n = std::max<std::size_t>(1, std::min(train_n, order.size() - 1));
    const std::vector<std::size_t> train_docs(order.begin(), order.begin() + train_n);
    const std::vector<std::size_t> test_docs(order.begin() + train_n, order.end());

    Bucketizer buckets;
    if (with_topics) {
      std::vector<double> values;
      for (std::size_t d : train_docs) {
        for (const auto& prof : (*profiles)[d]) {
          values.insert(values.end(), prof.probs.begin(), prof.probs.end());
        }
      }
      buckets = fit_bucketizer(values, config.buckets);
    }
    std::unordered_set<std::string> trigram_vocab;
    if (base_cfg.trigrams) {
      trigram_vocab = frequent_trigrams(corpus, train_docs, config.trigram_min_df);
    }

    auto build = [&](std::size_t d, const FeatureConfig& cfg) {
      static const std::vector<SentenceTopicProfile> empty;
      const auto& prof = with_topics ? (*profiles)[d] : empty;
      RatedInstance inst;
      inst.features = make_features(corpus.documents[d], corpus.vocabulary, prof,
                                    buckets, trigram_vocab, cfg);
      for (const auto& a : aspects) {
        inst.ratings.push_back(corpus.documents[d].ratings.at(a));
      }
      return inst;
    };

    for (int variant = 0; variant < n_variants; ++variant) {
      const FeatureConfig& cfg = variant == 0 ? base_cfg : topic_cfg;
      std::vector<RatedInstance> train_set, test_set;
      for (std::size_t d : train_docs) train_set.push_back(build(d, cfg));
      for (std::size_t d : test_docs) test_set.push_back(build(d, cfg));

      RankerModel model =
          train_ranker(train_set, aspects, config.rating_levels, config.epochs,
                       mix_seed(config.seed, 1000 + static_cast<std::uint64_t>(rep)));

      EvalCounts ev;
      ev.actual.resize(n_aspects);
      ev.predicted.resize(n_aspects);
      for (const auto& inst : test_set) {
        for (std::size_t a = 0; a < n_aspects; ++a) {
          ev.actual[a].push_back(inst.ratings[a]);
          ev.predicted[a].push_back(predict(model, a, inst.features));
        }
      }
      const std::vector<double> losses = per_aspect_loss(ev);
      for (std::size_t a = 0; a < n_aspects; ++a) {
        loss_sum[1 + variant][a] += losses[a];
      }
      if (rep == 0 && variant == n_variants - 1) {
        if (trained_model) *trained_model = model;
        if (used_buckets) *used_buckets = buckets;
        if (used_config) *used_config = cfg;
      }

      if (variant == 0) {
        // Constant-rating baseline on the same test split.
        EvalCounts base;
        base.actual.resize(n_aspects);
        base.predicted.resize(n_aspects);
        for (const auto& inst : test_set) {
          for (std::size_t a = 0; a < n_aspects; ++a) {
            base.actual[a].push_back(inst.ratings[a]);
            base.predicted[a].push_back(baseline_rate(inst.features));
          }
        }
        const std::vector<double> base_losses = per_aspect_loss(base);
        for (std::size_t a = 0; a < n_aspects; ++a) loss_sum[0][a] += base_losses[a];
      }
    }
  }

  RankReport report;
  report.aspects = aspects;
  auto push_row = [&](const std::string& name, const std::vector<double>& sums) {
    RankRow row;
    row.name = name;
    for (double s : sums) row.per_aspect.push_back(s / config.repeats);
    row.overall = std::accumulate(row.per_aspect.begin(), row.per_aspect.end(), 0.0) /
                  static_cast<double>(n_aspects);
    report.rows.push_back(std::move(row));
  };
  push_row("Baseline", loss_sum[0]);
  push_row("PRank", loss_sum[1]);
  if (with_topics) {
    push_row(model_tag == "mg" ? "PRank+MG-LDA" : "PRank+LDA", loss_sum[2]);
  }
  return report;
}

std::string rank_report_tsv(const RankReport& report) {
  std::ostringstream out;
  out << "Model\tOverall";
  for (const auto& a : report.aspects) out << '\t' << a;
  out << '\n';
  char buf[32];
  for (const auto& row : report.rows) {
    out << row.name;
    std::snprintf(buf, sizeof(buf), "%.3f", row.overall);
    out << '\t' << buf;
    for (double v : row.per_aspect) {
      std::snprintf(buf, sizeof(buf), "%.3f", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mgtm
