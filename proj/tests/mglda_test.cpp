#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "mgtm/mglda.hpp"
#include "mgtm/synth.hpp"
#include "support/test_util.hpp"

using namespace mgtm;

namespace {

// One document, one sentence, `tokens` copies of word 0, vocabulary of `vocab`.
Corpus tiny_corpus(int tokens, int vocab) {
  Corpus corpus;
  for (int w = 0; w < vocab; ++w) corpus.vocabulary.add(testutil::word_name(w));
  Document doc;
  doc.id = "d0";
  Sentence sent;
  for (int i = 0; i < tokens; ++i) sent.tokens.push_back(0);
  doc.sentences.push_back(sent);
  corpus.documents.push_back(doc);
  corpus.stats = corpus.recount();
  return corpus;
}

Hyperparams small_hyper(int kg, int kl, int t) {
  Hyperparams h;
  h.k_global = kg;
  h.k_local = kl;
  h.window = t;
  return h;
}

}  // namespace

TEST_CASE("a document with S sentences has S + T - 1 windows") {
  Corpus corpus = tiny_corpus(4, 3);
  MgldaState st = init_state(corpus, small_hyper(2, 2, 3), 1);
  CHECK(st.window_count(0) == 3);  // S=1, T=3
  CHECK(st.counts.docs[0].win_total.size() == 3);
}

TEST_CASE("init is deterministic per seed and consistent by construction") {
  Corpus corpus = testutil::random_corpus(4, 1, 3, 1, 5, 6, 99);
  MgldaState a = init_state(corpus, small_hyper(2, 3, 2), 7);
  MgldaState b = init_state(corpus, small_hyper(2, 3, 2), 7);
  MgldaState c = init_state(corpus, small_hyper(2, 3, 2), 8);
  CHECK(a.assignments == b.assignments);
  CHECK(a.assignments != c.assignments);
  CHECK_NOTHROW(check_consistency(a));
}

TEST_CASE("degenerate topic counts are rejected") {
  Corpus corpus = tiny_corpus(2, 2);
  CHECK_THROWS_AS(init_state(corpus, small_hyper(0, 2, 1), 1), std::invalid_argument);
  CHECK_THROWS_AS(init_state(corpus, small_hyper(2, 0, 1), 1), std::invalid_argument);
  Corpus empty;
  CHECK_THROWS_AS(init_state(empty, small_hyper(1, 1, 1), 1), std::invalid_argument);
}

TEST_CASE("conditional over empty counts is block-uniform with the prior mass split") {
  Hyperparams h = small_hyper(2, 3, 2);
  h.alpha_mix_global = 1.5;
  h.alpha_mix_local = 0.5;
  h.beta_global = 0.02;
  h.beta_local = 0.3;  // word factors must not matter when counts are empty
  Corpus corpus = tiny_corpus(1, 3);
  MgldaState st = init_state(corpus, h, 1);
  ConditionalTable tab = conditional(st, 0, 0);

  double global_mass = 0.0, local_mass = 0.0;
  for (int o = 0; o < 2; ++o) {
    for (int z = 0; z < 2; ++z) {
      CHECK(tab.global_cell(o, z) == doctest::Approx(tab.global_cell(0, 0)).epsilon(1e-12));
      global_mass += tab.global_cell(o, z);
    }
    for (int z = 0; z < 3; ++z) {
      CHECK(tab.local_cell(o, z) == doctest::Approx(tab.local_cell(0, 0)).epsilon(1e-12));
      local_mass += tab.local_cell(o, z);
    }
  }
  CHECK(global_mass / local_mass ==
        doctest::Approx(h.alpha_mix_global / h.alpha_mix_local).epsilon(1e-12));
  for (double p : tab.prob) CHECK(p > 0.0);
}

TEST_CASE("conditional matches the joint ratio on the tiny oracle instance") {
  // 2 docs x 2 sentences x 3 tokens, W=4, two topics per granularity, T=2.
  Corpus corpus = testutil::random_corpus(2, 2, 2, 3, 3, 4, 17);
  Hyperparams h = small_hyper(2, 2, 2);
  h.alpha_mix_global = 0.8;
  h.alpha_mix_local = 1.3;
  MgldaState st = init_state(corpus, h, 3);
  for (std::size_t d = 0; d < st.words.size(); ++d) {
    for (std::size_t i = 0; i < st.words[d].size(); ++i) {
      ConditionalTable tab = conditional(st, d, i);
      std::vector<double> want = testutil::mg_joint_ratio(st, d, i);
      CHECK(testutil::max_rel_err(tab.prob, want) < 1e-9);
    }
  }
  CHECK_NOTHROW(check_consistency(st));
}

TEST_CASE("local mass vanishes as the local mixture prior goes to zero") {
  Hyperparams h = small_hyper(2, 2, 2);
  h.alpha_mix_local = 1e-12;
  Corpus corpus = tiny_corpus(1, 3);
  MgldaState st = init_state(corpus, h, 1);
  ConditionalTable tab = conditional(st, 0, 0);
  double local_mass = 0.0;
  for (int o = 0; o < 2; ++o) {
    for (int z = 0; z < 2; ++z) local_mass += tab.local_cell(o, z);
  }
  CHECK(local_mass < 1e-9);
}

TEST_CASE("count tables stay consistent across sweeps") {
  Corpus corpus = testutil::random_corpus(5, 1, 4, 1, 6, 8, 23);
  MgldaState st = init_state(corpus, small_hyper(3, 2, 3), 5);
  for (int sweep = 0; sweep < 10; ++sweep) gibbs_sweep(st);
  CHECK(st.iteration == 10);
  CHECK_NOTHROW(check_consistency(st));
  CHECK(recount_tables(st) == st.counts);
}

TEST_CASE("fixed seed gives an identical trajectory") {
  Corpus corpus = testutil::random_corpus(4, 1, 3, 2, 5, 6, 31);
  MgldaState a = init_state(corpus, small_hyper(2, 2, 2), 11);
  MgldaState b = init_state(corpus, small_hyper(2, 2, 2), 11);
  for (int sweep = 0; sweep < 5; ++sweep) {
    gibbs_sweep(a);
    gibbs_sweep(b);
    REQUIRE(a.assignments == b.assignments);
  }
}

TEST_CASE("log_joint of an empty collection is the cancelled prior constant") {
  Corpus corpus;
  corpus.vocabulary.add("a");
  corpus.vocabulary.add("b");
  Hyperparams h = small_hyper(2, 3, 2);
  MgldaState st;
  st.corpus = &corpus;
  st.hyper = h;
  st.counts.word_topic_global.assign(corpus.vocabulary.size() * h.k_global, 0);
  st.counts.word_topic_local.assign(corpus.vocabulary.size() * h.k_local, 0);
  st.counts.topic_global.assign(h.k_global, 0);
  st.counts.topic_local.assign(h.k_local, 0);
  CHECK(std::abs(log_joint(st)) < 1e-9);
}

TEST_CASE("log_joint single-token closed form") {
  // W=2, one topic per granularity, T=1. The joint collapses to
  // word-choice 1/2 times the grain prior mass.
  Corpus corpus = tiny_corpus(1, 2);
  Hyperparams h = small_hyper(1, 1, 1);
  h.alpha_global = 0.5;
  h.alpha_local = 0.7;
  h.alpha_mix_global = 1.0;
  h.alpha_mix_local = 2.0;
  h.beta_global = 0.25;
  h.beta_local = 0.4;
  h.gamma = 0.3;
  MgldaState st = init_state(corpus, h, 1);
  set_token_assignment(st, 0, 0, Assignment{0, Grain::global, 0});
  CHECK(log_joint(st) == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-12));
  set_token_assignment(st, 0, 0, Assignment{0, Grain::local, 0});
  CHECK(log_joint(st) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("estimate_phi arithmetic") {
  Corpus corpus = tiny_corpus(2, 2);
  Hyperparams h = small_hyper(2, 1, 1);
  h.beta_global = 1.0;
  MgldaState st = init_state(corpus, h, 1);
  set_token_assignment(st, 0, 0, Assignment{0, Grain::global, 0});
  set_token_assignment(st, 0, 1, Assignment{0, Grain::global, 0});
  TopicModel tm = estimate_phi(st);
  CHECK(tm.phi_global[0][0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(tm.phi_global[0][1] == doctest::Approx(0.25).epsilon(1e-12));
  // Empty topic: prior only, uniform.
  CHECK(tm.phi_global[1][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tm.phi_global[1][1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("estimate_phi rows are stochastic and positive on random states") {
  Corpus corpus = testutil::random_corpus(5, 1, 3, 1, 6, 7, 41);
  MgldaState st = init_state(corpus, small_hyper(3, 2, 2), 2);
  for (int sweep = 0; sweep < 3; ++sweep) gibbs_sweep(st);
  TopicModel tm = estimate_phi(st);
  auto check_rows = [](const std::vector<std::vector<double>>& rows) {
    for (const auto& row : rows) {
      double total = 0.0;
      for (double p : row) {
        CHECK(p > 0.0);
        total += p;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  };
  check_rows(tm.phi_global);
  check_rows(tm.phi_local);
}

TEST_CASE("estimate_theta_sentence matches a direct evaluation at T=1") {
  Corpus corpus = testutil::random_corpus(3, 2, 3, 1, 4, 5, 53);
  Hyperparams h = small_hyper(2, 2, 1);
  MgldaState st = init_state(corpus, h, 9);
  for (int sweep = 0; sweep < 2; ++sweep) gibbs_sweep(st);

  const std::size_t d = 1, s = 0;
  SentenceTheta theta = estimate_theta_sentence(st, d, s);
  const DocCounts& dc = st.counts.docs[d];
  // T=1: single covering window v == s, window factor == 1.
  const double mix_den = dc.win_total[s] + h.alpha_mix_sum();
  const double to_global = (dc.win_global[s] + h.alpha_mix_global) / mix_den;
  const double to_local = (dc.win_local[s] + h.alpha_mix_local) / mix_den;
  CHECK(theta.global_mass == doctest::Approx(to_global).epsilon(1e-12));
  CHECK(theta.local_mass == doctest::Approx(to_local).epsilon(1e-12));
  for (int z = 0; z < h.k_global; ++z) {
    double want = (dc.doc_global_topic[z] + h.alpha_global) /
                  (dc.doc_global_total + h.k_global * h.alpha_global);
    CHECK(theta.global_topics[z] == doctest::Approx(want).epsilon(1e-12));
  }
  for (int z = 0; z < h.k_local; ++z) {
    double want = (dc.win_local_topic[s * h.k_local + z] + h.alpha_local) /
                  (dc.win_local[s] + h.k_local * h.alpha_local);
    CHECK(theta.local_topics[z] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("theta concentrates on a heavily used local topic") {
  Corpus corpus = tiny_corpus(40, 3);
  Hyperparams h = small_hyper(2, 3, 2);
  MgldaState st = init_state(corpus, h, 4);
  for (std::size_t i = 0; i < st.words[0].size(); ++i) {
    set_token_assignment(st, 0, i, Assignment{0, Grain::local, 0});
  }
  SentenceTheta theta = estimate_theta_sentence(st, 0, 0);
  CHECK(theta.local_topics[0] > 0.95);
  CHECK(theta.local_mass > 0.9);
  double total = 0.0;
  for (double p : theta.local_topics) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("theta of an empty sentence is prior-only uniform") {
  Corpus corpus;
  corpus.vocabulary.add("a");
  Document doc;
  doc.id = "d";
  doc.sentences.resize(2);
  doc.sentences[1].tokens = {0, 0, 0};
  corpus.documents.push_back(doc);
  corpus.stats = corpus.recount();

  Hyperparams h = small_hyper(3, 4, 1);  // T=1: sentence 0 owns its only window
  MgldaState st = init_state(corpus, h, 6);
  for (std::size_t i = 0; i < st.words[0].size(); ++i) {
    set_token_assignment(st, 0, i, Assignment{0, Grain::local, 1});
  }
  SentenceTheta theta = estimate_theta_sentence(st, 0, 0);
  for (int z = 0; z < h.k_global; ++z) {
    CHECK(theta.global_topics[z] == doctest::Approx(1.0 / h.k_global).epsilon(1e-12));
  }
  for (int z = 0; z < h.k_local; ++z) {
    CHECK(theta.local_topics[z] == doctest::Approx(1.0 / h.k_local).epsilon(1e-12));
  }
  CHECK_THROWS_AS(estimate_theta_sentence(st, 0, 99), std::out_of_range);
}

TEST_CASE("frozen-global window-1 sampler reduces to flat LDA") {
  Corpus corpus = testutil::random_corpus(6, 2, 4, 2, 6, 10, 77);
  const int k = 4;
  LdaState lda = lda_init(corpus, k, 0.1, 0.01, 13);
  Hyperparams h = small_hyper(k, 2, 1);
  h.alpha_global = lda.alpha;
  h.beta_global = lda.beta;
  MgldaState mg = init_state(corpus, h, 13);
  for (std::size_t d = 0; d < mg.words.size(); ++d) {
    for (std::size_t i = 0; i < mg.words[d].size(); ++i) {
      set_token_assignment(mg, d, i, Assignment{0, Grain::global, lda.topics[d][i]});
    }
  }
  for (std::size_t d = 0; d < mg.words.size(); ++d) {
    for (std::size_t i = 0; i < mg.words[d].size(); ++i) {
      ConditionalTable tab = conditional(mg, d, i);
      std::vector<double> mg_z(k);
      double total = 0.0;
      for (int z = 0; z < k; ++z) total += tab.global_cell(0, z);
      for (int z = 0; z < k; ++z) mg_z[z] = tab.global_cell(0, z) / total;
      std::vector<double> lda_z = lda_conditional(lda, d, i);
      CHECK(testutil::max_rel_err(mg_z, lda_z) < 1e-12);
    }
  }
}

TEST_CASE("log joint keeps improving past early burn-in on synthetic data") {
  SynthConfig cfg;
  cfg.documents = 30;
  cfg.sentences_per_doc = 5;
  cfg.tokens_per_sentence = 6;
  cfg.vocab_size = 30;
  cfg.hyper = small_hyper(3, 2, 3);
  int late_peaks = 0;
  const int sweeps = 800;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    SynthOutput synth = generate_synthetic(cfg);
    Corpus corpus = build_corpus(synth.documents, {}, 5, nullptr);
    MgldaState st = init_state(corpus, cfg.hyper, seed);
    int best_sweep = 0;
    double best = -1e300;
    for (int sweep = 1; sweep <= sweeps; ++sweep) {
      gibbs_sweep(st);
      double lj = log_joint(st);
      if (lj > best) {
        best = lj;
        best_sweep = sweep;
      }
    }
    if (best_sweep > sweeps / 10) ++late_peaks;
  }
  CHECK(late_peaks == 5);
}
