#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mgtm/corpus.hpp"
#include "mgtm/rng.hpp"

namespace mgtm {

/// Flat LDA with collapsed Gibbs sampling; comparison baseline for the
/// multi-grain model. Same single-writer contract as MgldaState.
struct LdaState {
  const Corpus* corpus = nullptr;
  int k = 40;
  double alpha = 0.1;
  double beta = 0.01;
  std::vector<std::vector<WordId>> words;  // flattened tokens per doc
  std::vector<std::vector<std::uint32_t>> sentence_of;
  std::vector<std::vector<std::uint16_t>> topics;
  std::vector<std::int32_t> word_topic;  // [w * k + z]
  std::vector<std::int32_t> topic_total;
  std::vector<std::vector<std::int32_t>> doc_topic;
  std::vector<std::int32_t> doc_total;
  Rng rng{0};
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
};

struct LdaEstimates {
  std::vector<std::vector<double>> phi;    // k x W
  std::vector<std::vector<double>> theta;  // D x k
};

LdaState lda_init(const Corpus& corpus, int k, double alpha, double beta,
                  std::uint64_t seed);

/// Topic distribution for token i of doc d, with the token excluded from the
/// counts during evaluation. Normalized; state restored before return.
std::vector<double> lda_conditional(LdaState& state, std::size_t d, std::size_t i);

/// Reassigns one token, keeping the count tables in step.
void lda_set_token_topic(LdaState& state, std::size_t d, std::size_t i, std::uint16_t z);

void lda_sweep(LdaState& state);

/// Single-document pass for resampling with a caller-supplied stream.
void lda_sweep_document(LdaState& state, std::size_t d, Rng& rng);

/// Collapsed log P(words, topics); the joint-ratio reference for the sampler.
double lda_log_joint(const LdaState& state);

LdaEstimates lda_estimate(const LdaState& state);

void lda_check_consistency(const LdaState& state);

void lda_run_sweeps(LdaState& state, int iterations,
                    const std::function<void(int, double)>& per_sweep = {});

}  // namespace mgtm
