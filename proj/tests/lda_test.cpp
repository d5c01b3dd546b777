#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mgtm/lda.hpp"
#include "support/test_util.hpp"

using namespace mgtm;

TEST_CASE("conditional over empty counts is uniform") {
  Corpus corpus = testutil::random_corpus(1, 1, 1, 1, 1, 3, 2);
  LdaState st = lda_init(corpus, 4, 0.2, 0.05, 1);
  std::vector<double> p = lda_conditional(st, 0, 0);
  for (double x : p) CHECK(x == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("k = 1 always assigns topic 0") {
  Corpus corpus = testutil::random_corpus(3, 1, 3, 1, 4, 5, 3);
  LdaState st = lda_init(corpus, 1, 0.1, 0.01, 1);
  for (int sweep = 0; sweep < 3; ++sweep) lda_sweep(st);
  for (const auto& doc : st.topics) {
    for (auto z : doc) CHECK(z == 0);
  }
}

TEST_CASE("conditional matches the collapsed joint ratio on tiny corpora") {
  Corpus corpus = testutil::random_corpus(2, 2, 2, 2, 3, 4, 19);
  LdaState st = lda_init(corpus, 3, 0.3, 0.08, 5);
  for (std::size_t d = 0; d < st.words.size(); ++d) {
    for (std::size_t i = 0; i < st.words[d].size(); ++i) {
      std::vector<double> got = lda_conditional(st, d, i);
      std::vector<double> want = testutil::lda_joint_ratio(st, d, i);
      CHECK(testutil::max_rel_err(got, want) < 1e-9);
    }
  }
}

TEST_CASE("library log joint agrees with the independent recount form") {
  Corpus corpus = testutil::random_corpus(4, 1, 3, 2, 5, 6, 29);
  LdaState st = lda_init(corpus, 3, 0.2, 0.05, 7);
  for (int sweep = 0; sweep < 4; ++sweep) lda_sweep(st);
  CHECK(lda_log_joint(st) ==
        doctest::Approx(testutil::lda_collapsed_joint(st)).epsilon(1e-12));
}

TEST_CASE("count tables stay consistent and runs are seed-deterministic") {
  Corpus corpus = testutil::random_corpus(5, 1, 4, 1, 6, 8, 37);
  LdaState a = lda_init(corpus, 4, 0.1, 0.01, 9);
  LdaState b = lda_init(corpus, 4, 0.1, 0.01, 9);
  for (int sweep = 0; sweep < 8; ++sweep) {
    lda_sweep(a);
    lda_sweep(b);
  }
  CHECK(a.topics == b.topics);
  CHECK(a.iteration == 8);
  CHECK_NOTHROW(lda_check_consistency(a));
}

TEST_CASE("estimator arithmetic") {
  // One doc, two tokens of distinct words, forced to topics 0 and 1.
  Corpus corpus;
  corpus.vocabulary.add("a");
  corpus.vocabulary.add("b");
  Document doc;
  doc.id = "d";
  doc.sentences.push_back(Sentence{{0, 1}, 0, 0});
  corpus.documents.push_back(doc);
  corpus.stats = corpus.recount();

  LdaState st = lda_init(corpus, 2, 1.0, 0.5, 1);
  lda_set_token_topic(st, 0, 0, 0);
  lda_set_token_topic(st, 0, 1, 1);
  LdaEstimates est = lda_estimate(st);
  // theta: counts [1,1], alpha=1 -> [0.5, 0.5]
  CHECK(est.theta[0][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.theta[0][1] == doctest::Approx(0.5).epsilon(1e-12));
  // phi row 0: word counts [1,0], beta=0.5, W=2 -> [0.75, 0.25]
  CHECK(est.phi[0][0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(est.phi[0][1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("estimator rows are stochastic on random states") {
  Corpus corpus = testutil::random_corpus(4, 1, 3, 1, 5, 6, 43);
  LdaState st = lda_init(corpus, 3, 0.1, 0.01, 3);
  for (int sweep = 0; sweep < 3; ++sweep) lda_sweep(st);
  LdaEstimates est = lda_estimate(st);
  for (const auto& row : est.phi) {
    double total = 0.0;
    for (double p : row) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (const auto& row : est.theta) {
    double total = 0.0;
    for (double p : row) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}
