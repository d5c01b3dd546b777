#include "mgtm/mglda.hpp"

#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>

namespace mgtm {

namespace {

struct Scratch {
  std::vector<double> table;        // T * (k_global + k_local)
  std::vector<double> global_cell;  // word factor * doc topic factor, per z
  std::vector<double> word_local;   // word factor, per z

  void resize(const Hyperparams& h) {
    table.resize(static_cast<std::size_t>(h.window) * (h.k_global + h.k_local));
    global_cell.resize(h.k_global);
    word_local.resize(h.k_local);
  }
};

void apply_token(MgldaState& st, std::size_t d, std::size_t i, const Assignment& a,
                 int delta) {
  const Hyperparams& h = st.hyper;
  DocCounts& dc = st.counts.docs[d];
  const WordId w = st.words[d][i];
  const std::uint32_t s = st.sentence_of[d][i];
  const std::size_t v = s + a.window_offset;

  dc.sent_win[static_cast<std::size_t>(s) * h.window + a.window_offset] += delta;
  dc.sent_total[s] += delta;
  dc.win_total[v] += delta;
  if (a.grain == Grain::global) {
    dc.win_global[v] += delta;
    dc.doc_global_topic[a.topic] += delta;
    dc.doc_global_total += delta;
    st.counts.word_topic_global[static_cast<std::size_t>(w) * h.k_global + a.topic] += delta;
    st.counts.topic_global[a.topic] += delta;
  } else {
    dc.win_local[v] += delta;
    dc.win_local_topic[v * h.k_local + a.topic] += delta;
    st.counts.word_topic_local[static_cast<std::size_t>(w) * h.k_local + a.topic] += delta;
    st.counts.topic_local[a.topic] += delta;
  }
}

// Fills the (o, grain, topic) table for a token whose counts have already
// been removed. Returns the table total.
double fill_conditional(const MgldaState& st, std::size_t d, std::size_t i,
                        Scratch& sc) {
  const Hyperparams& h = st.hyper;
  const DocCounts& dc = st.counts.docs[d];
  const int t_span = h.window;
  const int kg = h.k_global;
  const int kl = h.k_local;
  const WordId w = st.words[d][i];
  const std::uint32_t s = st.sentence_of[d][i];
  const double vocab = static_cast<double>(st.corpus->vocabulary.size());
  const double mix_sum = h.alpha_mix_sum();

  const double doc_global_den = dc.doc_global_total + kg * h.alpha_global;
  const std::int32_t* wtg = &st.counts.word_topic_global[static_cast<std::size_t>(w) * kg];
  for (int z = 0; z < kg; ++z) {
    double word = (wtg[z] + h.beta_global) /
                  (st.counts.topic_global[z] + vocab * h.beta_global);
    double topic = (dc.doc_global_topic[z] + h.alpha_global) / doc_global_den;
    sc.global_cell[z] = word * topic;
  }
  const std::int32_t* wtl = &st.counts.word_topic_local[static_cast<std::size_t>(w) * kl];
  for (int z = 0; z < kl; ++z) {
    sc.word_local[z] =
        (wtl[z] + h.beta_local) / (st.counts.topic_local[z] + vocab * h.beta_local);
  }

  const double sent_den = dc.sent_total[s] + t_span * h.gamma;
  double total = 0.0;
  double* out = sc.table.data();
  for (int o = 0; o < t_span; ++o) {
    const std::size_t v = s + o;
    const double win = (dc.sent_win[static_cast<std::size_t>(s) * t_span + o] + h.gamma) / sent_den;
    const double mix_den = dc.win_total[v] + mix_sum;
    const double to_global = win * (dc.win_global[v] + h.alpha_mix_global) / mix_den;
    const double to_local = win * (dc.win_local[v] + h.alpha_mix_local) / mix_den;
    const double local_den = dc.win_local[v] + kl * h.alpha_local;
    const std::int32_t* wlt = &dc.win_local_topic[v * kl];
    for (int z = 0; z < kg; ++z) {
      double p = to_global * sc.global_cell[z];
      *out++ = p;
      total += p;
    }
    for (int z = 0; z < kl; ++z) {
      double p = to_local * sc.word_local[z] * (wlt[z] + h.alpha_local) / local_den;
      *out++ = p;
      total += p;
    }
  }
  return total;
}

Assignment decode_cell(const Hyperparams& h, std::size_t cell) {
  const std::size_t stride = h.k_global + h.k_local;
  Assignment a;
  a.window_offset = static_cast<std::uint8_t>(cell / stride);
  std::size_t within = cell % stride;
  if (within < static_cast<std::size_t>(h.k_global)) {
    a.grain = Grain::global;
    a.topic = static_cast<std::uint16_t>(within);
  } else {
    a.grain = Grain::local;
    a.topic = static_cast<std::uint16_t>(within - h.k_global);
  }
  return a;
}

void sweep_document_impl(MgldaState& st, std::size_t d, Rng& rng, Scratch& sc) {
  auto& assigns = st.assignments[d];
  for (std::size_t i = 0; i < assigns.size(); ++i) {
    apply_token(st, d, i, assigns[i], -1);
    double total = fill_conditional(st, d, i, sc);
    double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t cell = sc.table.size() - 1;
    for (std::size_t c = 0; c < sc.table.size(); ++c) {
      acc += sc.table[c];
      if (u < acc) {
        cell = c;
        break;
      }
    }
    assigns[i] = decode_cell(st.hyper, cell);
    apply_token(st, d, i, assigns[i], +1);
  }
}

DocCounts make_doc_counts(const Hyperparams& h, std::size_t sentences) {
  DocCounts dc;
  const std::size_t windows = sentences + h.window - 1;
  dc.sent_win.assign(sentences * h.window, 0);
  dc.sent_total.assign(sentences, 0);
  dc.win_total.assign(windows, 0);
  dc.win_global.assign(windows, 0);
  dc.win_local.assign(windows, 0);
  dc.doc_global_topic.assign(h.k_global, 0);
  dc.win_local_topic.assign(windows * h.k_local, 0);
  return dc;
}

}  // namespace

void Hyperparams::validate() const {
  if (k_global < 1) throw std::invalid_argument("k_global must be >= 1");
  if (k_local < 1) throw std::invalid_argument("k_local must be >= 1");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  for (double x : {alpha_global, alpha_local, alpha_mix_global, alpha_mix_local,
                   beta_global, beta_local, gamma}) {
    if (!(x > 0.0)) throw std::invalid_argument("hyperparameters must be positive");
  }
}

MgldaState init_state(const Corpus& corpus, const Hyperparams& hyper, std::uint64_t seed) {
  hyper.validate();
  if (corpus.documents.empty()) throw std::invalid_argument("corpus is empty");

  MgldaState st;
  st.corpus = &corpus;
  st.hyper = hyper;
  st.rng = Rng(seed);
  st.seed = seed;

  const std::size_t d_count = corpus.documents.size();
  st.words.resize(d_count);
  st.sentence_of.resize(d_count);
  st.assignments.resize(d_count);
  st.counts.word_topic_global.assign(corpus.vocabulary.size() * hyper.k_global, 0);
  st.counts.word_topic_local.assign(corpus.vocabulary.size() * hyper.k_local, 0);
  st.counts.topic_global.assign(hyper.k_global, 0);
  st.counts.topic_local.assign(hyper.k_local, 0);
  st.counts.docs.resize(d_count);

  for (std::size_t d = 0; d < d_count; ++d) {
    FlatDoc flat = flatten_document(corpus.documents[d]);
    st.words[d] = std::move(flat.words);
    st.sentence_of[d] = std::move(flat.sentence_of);
    st.counts.docs[d] = make_doc_counts(hyper, corpus.documents[d].sentences.size());
    st.assignments[d].resize(st.words[d].size());
    for (std::size_t i = 0; i < st.words[d].size(); ++i) {
      Assignment a;
      a.window_offset = static_cast<std::uint8_t>(st.rng.uniform_int(hyper.window));
      a.grain = st.rng.uniform_int(2) == 0 ? Grain::global : Grain::local;
      a.topic = static_cast<std::uint16_t>(st.rng.uniform_int(
          a.grain == Grain::global ? hyper.k_global : hyper.k_local));
      st.assignments[d][i] = a;
      apply_token(st, d, i, a, +1);
    }
  }
  return st;
}

ConditionalTable conditional(MgldaState& state, std::size_t d, std::size_t i) {
  if (d >= state.words.size() || i >= state.words[d].size()) {
    throw std::out_of_range("conditional: token index out of range");
  }
  Scratch sc;
  sc.resize(state.hyper);
  const Assignment current = state.assignments[d][i];
  apply_token(state, d, i, current, -1);
  double total = fill_conditional(state, d, i, sc);
  apply_token(state, d, i, current, +1);

  ConditionalTable out;
  out.window_span = state.hyper.window;
  out.k_global = state.hyper.k_global;
  out.k_local = state.hyper.k_local;
  out.prob = std::move(sc.table);
  for (auto& p : out.prob) p /= total;
  return out;
}

void set_token_assignment(MgldaState& state, std::size_t d, std::size_t i,
                          const Assignment& a) {
  if (d >= state.words.size() || i >= state.words[d].size()) {
    throw std::out_of_range("set_token_assignment: token index out of range");
  }
  apply_token(state, d, i, state.assignments[d][i], -1);
  state.assignments[d][i] = a;
  apply_token(state, d, i, a, +1);
}

void gibbs_sweep(MgldaState& state) {
  Scratch sc;
  sc.resize(state.hyper);
  for (std::size_t d = 0; d < state.words.size(); ++d) {
    sweep_document_impl(state, d, state.rng, sc);
  }
  ++state.iteration;
}

void sweep_document(MgldaState& state, std::size_t d, Rng& rng) {
  if (d >= state.words.size()) {
    throw std::out_of_range("sweep_document: document index out of range");
  }
  Scratch sc;
  sc.resize(state.hyper);
  sweep_document_impl(state, d, rng, sc);
}

double log_joint(const MgldaState& state) {
  const Hyperparams& h = state.hyper;
  const double vocab = state.corpus ? static_cast<double>(state.corpus->vocabulary.size()) : 0.0;
  const int kg = h.k_global;
  const int kl = h.k_local;
  const int t_span = h.window;
  double lj = 0.0;

  // Words given grain and topic.
  lj += kg * (std::lgamma(vocab * h.beta_global) - vocab * std::lgamma(h.beta_global));
  for (int z = 0; z < kg; ++z) {
    lj -= std::lgamma(state.counts.topic_global[z] + vocab * h.beta_global);
  }
  for (std::size_t wz = 0; wz < state.counts.word_topic_global.size(); ++wz) {
    lj += std::lgamma(state.counts.word_topic_global[wz] + h.beta_global);
  }
  lj += kl * (std::lgamma(vocab * h.beta_local) - vocab * std::lgamma(h.beta_local));
  for (int z = 0; z < kl; ++z) {
    lj -= std::lgamma(state.counts.topic_local[z] + vocab * h.beta_local);
  }
  for (std::size_t wz = 0; wz < state.counts.word_topic_local.size(); ++wz) {
    lj += std::lgamma(state.counts.word_topic_local[wz] + h.beta_local);
  }

  // Window choices, grain choices and topic choices.
  const double lg_win_prior = std::lgamma(t_span * h.gamma) - t_span * std::lgamma(h.gamma);
  const double lg_mix_prior = std::lgamma(h.alpha_mix_sum()) -
                              std::lgamma(h.alpha_mix_global) -
                              std::lgamma(h.alpha_mix_local);
  const double lg_glob_prior =
      std::lgamma(kg * h.alpha_global) - kg * std::lgamma(h.alpha_global);
  const double lg_loc_prior =
      std::lgamma(kl * h.alpha_local) - kl * std::lgamma(h.alpha_local);

  for (std::size_t d = 0; d < state.counts.docs.size(); ++d) {
    const DocCounts& dc = state.counts.docs[d];
    const std::size_t sentences = dc.sent_total.size();
    const std::size_t windows = dc.win_total.size();

    for (std::size_t s = 0; s < sentences; ++s) {
      lj += lg_win_prior - std::lgamma(dc.sent_total[s] + t_span * h.gamma);
      for (int o = 0; o < t_span; ++o) {
        lj += std::lgamma(dc.sent_win[s * t_span + o] + h.gamma);
      }
    }
    for (std::size_t v = 0; v < windows; ++v) {
      lj += lg_mix_prior + std::lgamma(dc.win_global[v] + h.alpha_mix_global) +
            std::lgamma(dc.win_local[v] + h.alpha_mix_local) -
            std::lgamma(dc.win_total[v] + h.alpha_mix_sum());
      lj += lg_loc_prior - std::lgamma(dc.win_local[v] + kl * h.alpha_local);
      for (int z = 0; z < kl; ++z) {
        lj += std::lgamma(dc.win_local_topic[v * kl + z] + h.alpha_local);
      }
    }
    lj += lg_glob_prior - std::lgamma(dc.doc_global_total + kg * h.alpha_global);
    for (int z = 0; z < kg; ++z) {
      lj += std::lgamma(dc.doc_global_topic[z] + h.alpha_global);
    }
  }
  return lj;
}

TopicModel estimate_phi(const MgldaState& state) {
  const Hyperparams& h = state.hyper;
  const std::size_t vocab = state.corpus->vocabulary.size();
  TopicModel tm;
  tm.k_global = h.k_global;
  tm.k_local = h.k_local;
  tm.vocab_size = vocab;
  tm.phi_global.assign(h.k_global, std::vector<double>(vocab));
  tm.phi_local.assign(h.k_local, std::vector<double>(vocab));
  for (int z = 0; z < h.k_global; ++z) {
    const double den = state.counts.topic_global[z] + vocab * h.beta_global;
    for (std::size_t w = 0; w < vocab; ++w) {
      tm.phi_global[z][w] =
          (state.counts.word_topic_global[w * h.k_global + z] + h.beta_global) / den;
    }
  }
  for (int z = 0; z < h.k_local; ++z) {
    const double den = state.counts.topic_local[z] + vocab * h.beta_local;
    for (std::size_t w = 0; w < vocab; ++w) {
      tm.phi_local[z][w] =
          (state.counts.word_topic_local[w * h.k_local + z] + h.beta_local) / den;
    }
  }
  return tm;
}

SentenceTheta estimate_theta_sentence(const MgldaState& state, std::size_t d, std::size_t s) {
  if (d >= state.counts.docs.size()) {
    throw std::out_of_range("estimate_theta_sentence: document index out of range");
  }
  const DocCounts& dc = state.counts.docs[d];
  if (s >= dc.sent_total.size()) {
    throw std::out_of_range("estimate_theta_sentence: sentence index out of range");
  }
  const Hyperparams& h = state.hyper;
  const int kg = h.k_global;
  const int kl = h.k_local;

  SentenceTheta theta;
  theta.global_topics.assign(kg, 0.0);
  theta.local_topics.assign(kl, 0.0);

  const double sent_den = dc.sent_total[s] + h.window * h.gamma;
  const double doc_global_den = dc.doc_global_total + kg * h.alpha_global;
  for (int o = 0; o < h.window; ++o) {
    const std::size_t v = s + o;
    const double win = (dc.sent_win[s * h.window + o] + h.gamma) / sent_den;
    const double mix_den = dc.win_total[v] + h.alpha_mix_sum();
    const double to_global = win * (dc.win_global[v] + h.alpha_mix_global) / mix_den;
    const double to_local = win * (dc.win_local[v] + h.alpha_mix_local) / mix_den;
    const double local_den = dc.win_local[v] + kl * h.alpha_local;
    for (int z = 0; z < kg; ++z) {
      theta.global_topics[z] +=
          to_global * (dc.doc_global_topic[z] + h.alpha_global) / doc_global_den;
    }
    for (int z = 0; z < kl; ++z) {
      theta.local_topics[z] +=
          to_local * (dc.win_local_topic[v * kl + z] + h.alpha_local) / local_den;
    }
  }
  for (double p : theta.global_topics) theta.global_mass += p;
  for (double p : theta.local_topics) theta.local_mass += p;
  for (auto& p : theta.global_topics) p /= theta.global_mass;
  for (auto& p : theta.local_topics) p /= theta.local_mass;
  return theta;
}

CountTables recount_tables(const MgldaState& state) {
  const Hyperparams& h = state.hyper;
  CountTables ct;
  ct.word_topic_global.assign(state.counts.word_topic_global.size(), 0);
  ct.word_topic_local.assign(state.counts.word_topic_local.size(), 0);
  ct.topic_global.assign(h.k_global, 0);
  ct.topic_local.assign(h.k_local, 0);
  ct.docs.resize(state.counts.docs.size());
  for (std::size_t d = 0; d < state.counts.docs.size(); ++d) {
    ct.docs[d] = make_doc_counts(h, state.corpus->documents[d].sentences.size());
    DocCounts& dc = ct.docs[d];
    for (std::size_t i = 0; i < state.words[d].size(); ++i) {
      const Assignment& a = state.assignments[d][i];
      const WordId w = state.words[d][i];
      const std::uint32_t s = state.sentence_of[d][i];
      const std::size_t v = s + a.window_offset;
      ++dc.sent_win[static_cast<std::size_t>(s) * h.window + a.window_offset];
      ++dc.sent_total[s];
      ++dc.win_total[v];
      if (a.grain == Grain::global) {
        ++dc.win_global[v];
        ++dc.doc_global_topic[a.topic];
        ++dc.doc_global_total;
        ++ct.word_topic_global[static_cast<std::size_t>(w) * h.k_global + a.topic];
        ++ct.topic_global[a.topic];
      } else {
        ++dc.win_local[v];
        ++dc.win_local_topic[v * h.k_local + a.topic];
        ++ct.word_topic_local[static_cast<std::size_t>(w) * h.k_local + a.topic];
        ++ct.topic_local[a.topic];
      }
    }
  }
  return ct;
}

void check_consistency(const MgldaState& state) {
  if (!(recount_tables(state) == state.counts)) {
    std::ostringstream msg;
    msg << "count tables inconsistent with assignments at iteration "
        << state.iteration;
    throw std::logic_error(msg.str());
  }
}

void run_sweeps(MgldaState& state, int iterations,
                const std::function<void(int, double)>& per_sweep) {
  for (int it = 1; it <= iterations; ++it) {
    gibbs_sweep(state);
    if (per_sweep) per_sweep(it, log_joint(state));
  }
}

}  // namespace mgtm
