#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mgtm/features.hpp"
#include "support/test_util.hpp"

using namespace mgtm;

namespace {

Hyperparams hyper(int kg, int kl, int t) {
  Hyperparams h;
  h.k_global = kg;
  h.k_local = kl;
  h.window = t;
  return h;
}

}  // namespace

TEST_CASE("resampling leaves the rest of the chain bit-identical") {
  Corpus corpus = testutil::random_corpus(8, 1, 4, 2, 6, 10, 61);
  MgldaState st = init_state(corpus, hyper(3, 2, 2), 5);
  for (int sweep = 0; sweep < 5; ++sweep) gibbs_sweep(st);
  const auto assignments_before = st.assignments;
  const auto counts_before = st.counts;
  const auto iteration_before = st.iteration;

  resample_doc(st, 2, 20, 123);

  CHECK(st.assignments == assignments_before);
  CHECK(st.counts == counts_before);
  CHECK(st.iteration == iteration_before);
  CHECK_NOTHROW(check_consistency(st));
}

TEST_CASE("lda resampling also restores the chain") {
  Corpus corpus = testutil::random_corpus(6, 1, 3, 2, 5, 8, 67);
  LdaState st = lda_init(corpus, 3, 0.1, 0.01, 5);
  for (int sweep = 0; sweep < 5; ++sweep) lda_sweep(st);
  const auto topics_before = st.topics;
  const auto word_topic_before = st.word_topic;
  resample_doc(st, 1, 15, 9);
  CHECK(st.topics == topics_before);
  CHECK(st.word_topic == word_topic_before);
  CHECK_NOTHROW(lda_check_consistency(st));
}

TEST_CASE("profile equals the mean of the recorded samples") {
  Corpus corpus = testutil::random_corpus(4, 2, 3, 2, 5, 8, 71);
  MgldaState st = init_state(corpus, hyper(2, 3, 2), 3);
  for (int sweep = 0; sweep < 3; ++sweep) gibbs_sweep(st);

  const std::size_t d = 1;
  const int kl = st.hyper.k_local;
  const auto& doc = corpus.documents[d];
  std::vector<std::vector<int>> recorded;
  auto sink = [&](std::span<const int> counts) {
    recorded.emplace_back(counts.begin(), counts.end());
  };
  const int samples = 12;
  auto profiles = resample_doc(st, d, samples, 77, sink);
  REQUIRE(recorded.size() == samples);
  REQUIRE(profiles.size() == doc.sentences.size());
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const double len = static_cast<double>(doc.sentences[s].tokens.size());
    double total = 0.0;
    for (int z = 0; z < kl; ++z) {
      double mean = 0.0;
      for (const auto& sample : recorded) mean += sample[s * kl + z];
      mean /= samples;
      const double want = len > 0 ? mean / len : 0.0;
      CHECK(profiles[s].probs[z] == want);  // integer sums: exact
      total += profiles[s].probs[z];
    }
    CHECK(total <= 1.0 + 1e-9);  // local topics carry at most the full sentence
  }
}

TEST_CASE("empty sentences get an all-zero profile") {
  Corpus corpus;
  corpus.vocabulary.add("a");
  Document doc;
  doc.id = "d";
  doc.sentences.resize(2);
  doc.sentences[1].tokens = {0, 0};
  corpus.documents.push_back(doc);
  corpus.stats = corpus.recount();
  MgldaState st = init_state(corpus, hyper(1, 2, 1), 2);
  auto profiles = resample_doc(st, 0, 5, 1);
  for (double p : profiles[0].probs) CHECK(p == 0.0);
}

TEST_CASE("a sentence sampled entirely into one topic reports probability one") {
  // A large ballast document pins word 0 to local topic 3 and a wide
  // vocabulary makes the word factor decisive, so the probe document's two
  // tokens stay on topic 3 through the resample.
  Corpus corpus;
  for (int w = 0; w < 40; ++w) corpus.vocabulary.add(testutil::word_name(w));
  Document probe;
  probe.id = "probe";
  probe.sentences.push_back(Sentence{{0, 0}, 0, 0});
  Document ballast;
  ballast.id = "ballast";
  ballast.sentences.push_back(Sentence{std::vector<WordId>(400, 0), 0, 0});
  corpus.documents = {probe, ballast};
  corpus.stats = corpus.recount();

  Hyperparams h = hyper(1, 4, 1);
  h.alpha_mix_global = 1e-9;  // force the local route
  h.beta_local = 0.01;
  MgldaState st = init_state(corpus, h, 11);
  for (std::size_t i = 0; i < st.words[1].size(); ++i) {
    set_token_assignment(st, 1, i, Assignment{0, Grain::local, 3});
  }
  for (std::size_t i = 0; i < st.words[0].size(); ++i) {
    set_token_assignment(st, 0, i, Assignment{0, Grain::local, 3});
  }
  std::vector<std::vector<int>> recorded;
  auto profiles = resample_doc(st, 0, 1, 5, [&](std::span<const int> counts) {
    recorded.emplace_back(counts.begin(), counts.end());
  });
  REQUIRE(recorded.size() == 1);
  REQUIRE(recorded[0][3] == 2);  // both tokens on topic 3 in the one sample
  CHECK(profiles[0].probs[3] == 1.0);
}

TEST_CASE("near-symmetric two-topic state averages to a half-half profile") {
  Corpus corpus;
  corpus.vocabulary.add("a");
  corpus.vocabulary.add("b");
  Document doc;
  doc.id = "d";
  doc.sentences.push_back(Sentence{{0, 1}, 0, 0});
  corpus.documents.push_back(doc);
  corpus.stats = corpus.recount();

  Hyperparams h = hyper(1, 2, 1);
  h.alpha_mix_global = 1e-9;
  h.alpha_local = 1.0;
  h.beta_local = 1.0;  // smooth priors keep the two-mode chain mixing
  MgldaState st = init_state(corpus, h, 19);
  auto profiles = resample_doc(st, 0, 3000, 7);
  CHECK(profiles[0].probs[0] == doctest::Approx(0.5).epsilon(0.2));
  CHECK(profiles[0].probs[1] == doctest::Approx(0.5).epsilon(0.2));
  CHECK(std::abs(profiles[0].probs[0] - 0.5) < 0.1);
}

TEST_CASE("out-of-range document or bad sample count is rejected") {
  Corpus corpus = testutil::random_corpus(2, 1, 2, 1, 3, 4, 5);
  MgldaState st = init_state(corpus, hyper(1, 2, 1), 2);
  CHECK_THROWS_AS(resample_doc(st, 99, 5, 1), std::out_of_range);
  CHECK_THROWS_AS(resample_doc(st, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("bucketizer thresholds split the training values evenly") {
  Rng rng(5);
  std::vector<double> values;
  for (int i = 0; i < 5000; ++i) values.push_back(rng.uniform());
  Bucketizer b = fit_bucketizer(values, 5);
  REQUIRE(b.thresholds.size() == 4);
  std::vector<int> hits(5, 0);
  for (double v : values) ++hits[b.bucket(v)];
  for (int h : hits) {
    CHECK(h > 5000 / 5 - 150);  // within 3% of an even split
    CHECK(h < 5000 / 5 + 150);
  }
}

TEST_CASE("bucketizer edge cases") {
  Bucketizer b = fit_bucketizer({0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, 5);
  CHECK(b.bucket(0.0) == 0);
  CHECK(b.bucket(0.9) == 4);  // the maximum clears every threshold

  Bucketizer same = fit_bucketizer({0.4, 0.4, 0.4, 0.4}, 5);
  CHECK(same.bucket(0.4) == 0);  // ties break toward the lower bucket

  Rng rng(9);
  Bucketizer random_fit = fit_bucketizer({0.2, 0.5, 0.9, 0.33, 0.7}, 5);
  for (int i = 0; i < 200; ++i) {
    double p = rng.uniform();
    double q = rng.uniform();
    if (p > q) std::swap(p, q);
    CHECK(random_fit.bucket(p) <= random_fit.bucket(q));
  }
}

TEST_CASE("conjunction features name token, model, topic and bucket") {
  Corpus corpus;
  const WordId great = corpus.vocabulary.add("great");
  const WordId view = corpus.vocabulary.add("view");
  Document doc;
  doc.id = "d";
  doc.sentences.push_back(Sentence{{great, view}, 0, 0});
  corpus.documents.push_back(doc);

  SentenceTopicProfile prof;
  prof.doc_id = "d";
  prof.sentence = 0;
  prof.probs = {0.05, 0.0, 0.1, 0.4};
  Bucketizer buckets;
  buckets.thresholds = {0.1, 0.3, 0.5, 0.7};  // 0.4 lands in bucket 2

  FeatureConfig cfg;
  cfg.model_tag = "mg";
  auto feats = make_features(doc, corpus.vocabulary, {prof}, buckets, {}, cfg);
  auto has = [&](const std::string& f) {
    return std::find(feats.begin(), feats.end(), f) != feats.end();
  };
  CHECK(has("great"));
  CHECK(has("view"));
  CHECK(has("great_view"));
  CHECK(has("great&mg&t3&b2"));
  CHECK(has("view&mg&t3&b2"));
  CHECK_FALSE(has("great&mg&t1&b0"));  // zero-probability topics emit nothing
}

TEST_CASE("documents with no topic mass fall back to n-grams only") {
  Corpus corpus;
  const WordId a = corpus.vocabulary.add("quiet");
  const WordId b = corpus.vocabulary.add("street");
  Document doc;
  doc.id = "d";
  doc.sentences.push_back(Sentence{{a, b}, 0, 0});
  corpus.documents.push_back(doc);
  SentenceTopicProfile prof;
  prof.probs = {0.0, 0.0};
  FeatureConfig cfg;
  cfg.model_tag = "mg";
  auto feats = make_features(doc, corpus.vocabulary, {prof}, Bucketizer{{0.1}}, {}, cfg);
  CHECK(feats == std::vector<std::string>{"quiet", "quiet_street", "street"});
}

TEST_CASE("top-k larger than the topic count uses every topic") {
  Corpus corpus;
  const WordId a = corpus.vocabulary.add("warm");
  Document doc;
  doc.id = "d";
  doc.sentences.push_back(Sentence{{a}, 0, 0});
  corpus.documents.push_back(doc);
  SentenceTopicProfile prof;
  prof.probs = {0.5, 0.5};
  FeatureConfig cfg;
  cfg.model_tag = "lda";
  cfg.top_k = 10;
  auto feats = make_features(doc, corpus.vocabulary, {prof}, Bucketizer{{}}, {}, cfg);
  auto has = [&](const std::string& f) {
    return std::find(feats.begin(), feats.end(), f) != feats.end();
  };
  CHECK(has("warm&lda&t0&b0"));
  CHECK(has("warm&lda&t1&b0"));
}

TEST_CASE("frequent trigrams are selected by document frequency") {
  std::vector<RawDocument> raw;
  for (int i = 0; i < 6; ++i) {
    raw.push_back({"d" + std::to_string(i), "Close to the tube station entrance.", {}});
  }
  raw.push_back({"rare", "Quiet courtyard garden view here.", {}});
  Corpus corpus = build_corpus(raw, {"to", "the"}, 5, nullptr);
  std::vector<std::size_t> ids(corpus.documents.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  auto tri = frequent_trigrams(corpus, ids, 5);
  CHECK(tri.count("close_tube_station") == 1);
  CHECK(tri.count("quiet_courtyard_garden") == 0);
}
