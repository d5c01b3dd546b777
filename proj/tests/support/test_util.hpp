// Shared helpers for the unit and acceptance suites: small random corpora and
// the brute-force joint-ratio oracles the samplers are checked against.
#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mgtm/corpus.hpp"
#include "mgtm/lda.hpp"
#include "mgtm/mglda.hpp"
#include "mgtm/rng.hpp"

namespace testutil {

inline std::string word_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%03d", i);
  return buf;
}

/// Corpus with `docs` documents, sentence and token counts drawn uniformly
/// from the given inclusive ranges, over a vocabulary of `vocab` words.
inline mgtm::Corpus random_corpus(int docs, int min_sent, int max_sent, int min_tok,
                                  int max_tok, int vocab, std::uint64_t seed) {
  mgtm::Corpus corpus;
  for (int w = 0; w < vocab; ++w) corpus.vocabulary.add(word_name(w));
  mgtm::Rng rng(seed);
  for (int d = 0; d < docs; ++d) {
    mgtm::Document doc;
    doc.id = "doc-" + std::to_string(d);
    const int sentences =
        min_sent + static_cast<int>(rng.uniform_int(max_sent - min_sent + 1));
    for (int s = 0; s < sentences; ++s) {
      mgtm::Sentence sent;
      const int tokens =
          min_tok + static_cast<int>(rng.uniform_int(max_tok - min_tok + 1));
      for (int i = 0; i < tokens; ++i) {
        sent.tokens.push_back(static_cast<mgtm::WordId>(rng.uniform_int(vocab)));
      }
      doc.sentences.push_back(std::move(sent));
    }
    corpus.documents.push_back(std::move(doc));
  }
  corpus.stats = corpus.recount();
  return corpus;
}

/// Normalized joint-ratio distribution over every (window offset, grain,
/// topic) cell of one token, evaluated by filling the cell in and taking the
/// closed-form joint. The state is restored before returning.
inline std::vector<double> mg_joint_ratio(mgtm::MgldaState& st, std::size_t d,
                                          std::size_t i) {
  const mgtm::Hyperparams& h = st.hyper;
  const mgtm::Assignment original = st.assignments[d][i];
  std::vector<double> logs;
  for (int o = 0; o < h.window; ++o) {
    for (int z = 0; z < h.k_global; ++z) {
      mgtm::set_token_assignment(
          st, d, i,
          mgtm::Assignment{static_cast<std::uint8_t>(o), mgtm::Grain::global,
                           static_cast<std::uint16_t>(z)});
      logs.push_back(mgtm::log_joint(st));
    }
    for (int z = 0; z < h.k_local; ++z) {
      mgtm::set_token_assignment(
          st, d, i,
          mgtm::Assignment{static_cast<std::uint8_t>(o), mgtm::Grain::local,
                           static_cast<std::uint16_t>(z)});
      logs.push_back(mgtm::log_joint(st));
    }
  }
  mgtm::set_token_assignment(st, d, i, original);
  double mx = logs[0];
  for (double l : logs) mx = std::max(mx, l);
  double total = 0.0;
  std::vector<double> out(logs.size());
  for (std::size_t c = 0; c < logs.size(); ++c) {
    out[c] = std::exp(logs[c] - mx);
    total += out[c];
  }
  for (auto& p : out) p /= total;
  return out;
}

/// Collapsed LDA joint recomputed from scratch (counts rebuilt from the
/// assignment array); deliberately independent of the library's incremental
/// tables and of lda_log_joint.
inline double lda_collapsed_joint(const mgtm::LdaState& st) {
  const int k = st.k;
  const std::size_t vocab = st.corpus->vocabulary.size();
  std::vector<long> n_zw(vocab * k, 0), n_z(k, 0);
  std::vector<std::vector<long>> n_dz(st.words.size(), std::vector<long>(k, 0));
  std::vector<long> n_d(st.words.size(), 0);
  for (std::size_t d = 0; d < st.words.size(); ++d) {
    for (std::size_t i = 0; i < st.words[d].size(); ++i) {
      const int z = st.topics[d][i];
      ++n_zw[static_cast<std::size_t>(st.words[d][i]) * k + z];
      ++n_z[z];
      ++n_dz[d][z];
      ++n_d[d];
    }
  }
  const double wb = static_cast<double>(vocab) * st.beta;
  const double ka = k * st.alpha;
  double lj = k * (std::lgamma(wb) - vocab * std::lgamma(st.beta));
  for (int z = 0; z < k; ++z) lj -= std::lgamma(n_z[z] + wb);
  for (std::size_t wz = 0; wz < n_zw.size(); ++wz) {
    lj += std::lgamma(n_zw[wz] + st.beta);
  }
  lj += st.words.size() * (std::lgamma(ka) - k * std::lgamma(st.alpha));
  for (std::size_t d = 0; d < st.words.size(); ++d) {
    lj -= std::lgamma(n_d[d] + ka);
    for (int z = 0; z < k; ++z) lj += std::lgamma(n_dz[d][z] + st.alpha);
  }
  return lj;
}

inline std::vector<double> lda_joint_ratio(mgtm::LdaState& st, std::size_t d,
                                           std::size_t i) {
  const std::uint16_t original = st.topics[d][i];
  std::vector<double> logs(st.k);
  for (int z = 0; z < st.k; ++z) {
    mgtm::lda_set_token_topic(st, d, i, static_cast<std::uint16_t>(z));
    logs[z] = lda_collapsed_joint(st);
  }
  mgtm::lda_set_token_topic(st, d, i, original);
  double mx = logs[0];
  for (double l : logs) mx = std::max(mx, l);
  double total = 0.0;
  std::vector<double> out(st.k);
  for (int z = 0; z < st.k; ++z) {
    out[z] = std::exp(logs[z] - mx);
    total += out[z];
  }
  for (auto& p : out) p /= total;
  return out;
}

inline double max_rel_err(const std::vector<double>& got,
                          const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double denom = std::max(std::abs(want[i]), 1e-300);
    worst = std::max(worst, std::abs(got[i] - want[i]) / denom);
  }
  return worst;
}

/// Mean total-variation distance between true and estimated rows under the
/// best topic permutation (exhaustive; fine for small k).
inline double matched_mean_tv(const std::vector<std::vector<double>>& truth,
                              const std::vector<std::vector<double>>& est) {
  const std::size_t k = truth.size();
  std::vector<int> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = static_cast<int>(i);
  auto tv = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t w = 0; w < a.size(); ++w) s += std::abs(a[w] - b[w]);
    return 0.5 * s;
  };
  double best = 1e300;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) total += tv(truth[i], est[perm[i]]);
    best = std::min(best, total / static_cast<double>(k));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace testutil
