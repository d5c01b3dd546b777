#include "mgtm/lda.hpp"

#include <cmath>
#include <stdexcept>

namespace mgtm {

namespace {

void apply_token(LdaState& st, std::size_t d, std::size_t i, std::uint16_t z, int delta) {
  const WordId w = st.words[d][i];
  st.word_topic[static_cast<std::size_t>(w) * st.k + z] += delta;
  st.topic_total[z] += delta;
  st.doc_topic[d][z] += delta;
  st.doc_total[d] += delta;
}

double fill_conditional(const LdaState& st, std::size_t d, std::size_t i,
                        std::vector<double>& out) {
  const WordId w = st.words[d][i];
  const double vocab = static_cast<double>(st.corpus->vocabulary.size());
  const double doc_den = st.doc_total[d] + st.k * st.alpha;
  const std::int32_t* wt = &st.word_topic[static_cast<std::size_t>(w) * st.k];
  double total = 0.0;
  for (int z = 0; z < st.k; ++z) {
    double p = (wt[z] + st.beta) / (st.topic_total[z] + vocab * st.beta) *
               (st.doc_topic[d][z] + st.alpha) / doc_den;
    out[z] = p;
    total += p;
  }
  return total;
}

void sweep_document_impl(LdaState& st, std::size_t d, Rng& rng, std::vector<double>& table) {
  auto& topics = st.topics[d];
  for (std::size_t i = 0; i < topics.size(); ++i) {
    apply_token(st, d, i, topics[i], -1);
    double total = fill_conditional(st, d, i, table);
    double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t z = table.size() - 1;
    for (std::size_t c = 0; c < table.size(); ++c) {
      acc += table[c];
      if (u < acc) {
        z = c;
        break;
      }
    }
    topics[i] = static_cast<std::uint16_t>(z);
    apply_token(st, d, i, topics[i], +1);
  }
}

}  // namespace

LdaState lda_init(const Corpus& corpus, int k, double alpha, double beta,
                  std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("alpha and beta must be positive");
  }
  if (corpus.documents.empty()) throw std::invalid_argument("corpus is empty");

  LdaState st;
  st.corpus = &corpus;
  st.k = k;
  st.alpha = alpha;
  st.beta = beta;
  st.rng = Rng(seed);
  st.seed = seed;

  const std::size_t d_count = corpus.documents.size();
  st.words.resize(d_count);
  st.sentence_of.resize(d_count);
  st.topics.resize(d_count);
  st.word_topic.assign(corpus.vocabulary.size() * k, 0);
  st.topic_total.assign(k, 0);
  st.doc_topic.assign(d_count, std::vector<std::int32_t>(k, 0));
  st.doc_total.assign(d_count, 0);

  for (std::size_t d = 0; d < d_count; ++d) {
    FlatDoc flat = flatten_document(corpus.documents[d]);
    st.words[d] = std::move(flat.words);
    st.sentence_of[d] = std::move(flat.sentence_of);
    st.topics[d].resize(st.words[d].size());
    for (std::size_t i = 0; i < st.words[d].size(); ++i) {
      st.topics[d][i] = static_cast<std::uint16_t>(st.rng.uniform_int(k));
      apply_token(st, d, i, st.topics[d][i], +1);
    }
  }
  return st;
}

std::vector<double> lda_conditional(LdaState& state, std::size_t d, std::size_t i) {
  if (d >= state.words.size() || i >= state.words[d].size()) {
    throw std::out_of_range("lda_conditional: token index out of range");
  }
  std::vector<double> table(state.k);
  const std::uint16_t current = state.topics[d][i];
  apply_token(state, d, i, current, -1);
  double total = fill_conditional(state, d, i, table);
  apply_token(state, d, i, current, +1);
  for (auto& p : table) p /= total;
  return table;
}

void lda_set_token_topic(LdaState& state, std::size_t d, std::size_t i, std::uint16_t z) {
  if (d >= state.words.size() || i >= state.words[d].size()) {
    throw std::out_of_range("lda_set_token_topic: token index out of range");
  }
  apply_token(state, d, i, state.topics[d][i], -1);
  state.topics[d][i] = z;
  apply_token(state, d, i, z, +1);
}

void lda_sweep(LdaState& state) {
  std::vector<double> table(state.k);
  for (std::size_t d = 0; d < state.words.size(); ++d) {
    sweep_document_impl(state, d, state.rng, table);
  }
  ++state.iteration;
}

void lda_sweep_document(LdaState& state, std::size_t d, Rng& rng) {
  if (d >= state.words.size()) {
    throw std::out_of_range("lda_sweep_document: document index out of range");
  }
  std::vector<double> table(state.k);
  sweep_document_impl(state, d, rng, table);
}

double lda_log_joint(const LdaState& state) {
  const double vocab = static_cast<double>(state.corpus->vocabulary.size());
  const int k = state.k;
  double lj = 0.0;
  lj += k * (std::lgamma(vocab * state.beta) - vocab * std::lgamma(state.beta));
  for (int z = 0; z < k; ++z) {
    lj -= std::lgamma(state.topic_total[z] + vocab * state.beta);
  }
  for (std::size_t wz = 0; wz < state.word_topic.size(); ++wz) {
    lj += std::lgamma(state.word_topic[wz] + state.beta);
  }
  const double doc_prior = std::lgamma(k * state.alpha) - k * std::lgamma(state.alpha);
  for (std::size_t d = 0; d < state.doc_topic.size(); ++d) {
    lj += doc_prior - std::lgamma(state.doc_total[d] + k * state.alpha);
    for (int z = 0; z < k; ++z) {
      lj += std::lgamma(state.doc_topic[d][z] + state.alpha);
    }
  }
  return lj;
}

LdaEstimates lda_estimate(const LdaState& state) {
  const std::size_t vocab = state.corpus->vocabulary.size();
  LdaEstimates est;
  est.phi.assign(state.k, std::vector<double>(vocab));
  for (int z = 0; z < state.k; ++z) {
    const double den = state.topic_total[z] + vocab * state.beta;
    for (std::size_t w = 0; w < vocab; ++w) {
      est.phi[z][w] = (state.word_topic[w * state.k + z] + state.beta) / den;
    }
  }
  est.theta.assign(state.doc_topic.size(), std::vector<double>(state.k));
  for (std::size_t d = 0; d < state.doc_topic.size(); ++d) {
    const double den = state.doc_total[d] + state.k * state.alpha;
    for (int z = 0; z < state.k; ++z) {
      est.theta[d][z] = (state.doc_topic[d][z] + state.alpha) / den;
    }
  }
  return est;
}

void lda_check_consistency(const LdaState& state) {
  std::vector<std::int32_t> word_topic(state.word_topic.size(), 0);
  std::vector<std::int32_t> topic_total(state.k, 0);
  std::vector<std::vector<std::int32_t>> doc_topic(state.doc_topic.size(),
                                                   std::vector<std::int32_t>(state.k, 0));
  std::vector<std::int32_t> doc_total(state.doc_total.size(), 0);
  for (std::size_t d = 0; d < state.words.size(); ++d) {
    for (std::size_t i = 0; i < state.words[d].size(); ++i) {
      const WordId w = state.words[d][i];
      const std::uint16_t z = state.topics[d][i];
      ++word_topic[static_cast<std::size_t>(w) * state.k + z];
      ++topic_total[z];
      ++doc_topic[d][z];
      ++doc_total[d];
    }
  }
  if (word_topic != state.word_topic || topic_total != state.topic_total ||
      doc_topic != state.doc_topic || doc_total != state.doc_total) {
    throw std::logic_error("lda count tables inconsistent with assignments");
  }
}

void lda_run_sweeps(LdaState& state, int iterations,
                    const std::function<void(int, double)>& per_sweep) {
  for (int it = 1; it <= iterations; ++it) {
    lda_sweep(state);
    if (per_sweep) per_sweep(it, lda_log_joint(state));
  }
}

}  // namespace mgtm
