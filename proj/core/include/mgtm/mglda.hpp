#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mgtm/corpus.hpp"
#include "mgtm/rng.hpp"

namespace mgtm {

/// Priors and structural constants of the multi-grain model.
///
/// Each document is covered by overlapping windows of `window` adjacent
/// sentences; a document with S sentences has S + window - 1 windows and
/// sentence s may emit into windows s .. s + window - 1 (stored per token as
/// the offset o = v - s). Every token carries a window choice, a
/// global/local granularity flag and a topic.
struct Hyperparams {
  int k_global = 30;
  int k_local = 10;
  int window = 3;  // T, in sentences
  double alpha_global = 0.1;
  double alpha_local = 0.1;
  double alpha_mix_global = 1.0;  // asymmetric Beta prior on the
  double alpha_mix_local = 1.0;   // global-vs-local preference
  double beta_global = 0.01;
  double beta_local = 0.01;
  double gamma = 0.1;  // window-choice smoothing

  double alpha_mix_sum() const { return alpha_mix_global + alpha_mix_local; }

  /// Throws std::invalid_argument unless all counts >= 1 and scalars > 0.
  void validate() const;
};

enum class Grain : std::uint8_t { global = 0, local = 1 };

struct Assignment {
  std::uint8_t window_offset = 0;  // o in 0..T-1; the token's window is s + o
  Grain grain = Grain::global;
  std::uint16_t topic = 0;

  bool operator==(const Assignment&) const = default;
};

/// Per-document slice of the incremental count tables.
struct DocCounts {
  std::vector<std::int32_t> sent_win;       // [s * T + o] tokens of sentence s in window s+o
  std::vector<std::int32_t> sent_total;     // [s]
  std::vector<std::int32_t> win_total;      // [v], v in 0..S+T-2
  std::vector<std::int32_t> win_global;     // [v] tokens of window v with global grain
  std::vector<std::int32_t> win_local;      // [v]
  std::vector<std::int32_t> doc_global_topic;  // [z]
  std::int32_t doc_global_total = 0;
  std::vector<std::int32_t> win_local_topic;  // [v * k_local + z]

  bool operator==(const DocCounts&) const = default;
};

struct CountTables {
  // Collection-wide word-topic tables, word-major: [w * K + z].
  std::vector<std::int32_t> word_topic_global;
  std::vector<std::int32_t> word_topic_local;
  std::vector<std::int32_t> topic_global;  // [z] totals
  std::vector<std::int32_t> topic_local;
  std::vector<DocCounts> docs;

  bool operator==(const CountTables&) const = default;
};

/// Full sampler state. Single writer; independent chains over the same
/// (immutable) corpus may run concurrently.
struct MgldaState {
  const Corpus* corpus = nullptr;
  Hyperparams hyper;
  std::vector<std::vector<WordId>> words;            // flattened tokens per doc
  std::vector<std::vector<std::uint32_t>> sentence_of;
  std::vector<std::vector<Assignment>> assignments;
  CountTables counts;
  Rng rng{0};
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;

  std::size_t window_count(std::size_t d) const {
    return corpus->documents[d].sentences.size() + hyper.window - 1;
  }
};

/// Word distributions recovered from a sample.
struct TopicModel {
  int k_global = 0;
  int k_local = 0;
  std::size_t vocab_size = 0;
  std::vector<std::vector<double>> phi_global;  // k_global x W, rows sum to 1
  std::vector<std::vector<double>> phi_local;
};

/// Unnormalized-then-normalized sampling distribution for one token over
/// (window offset, grain, topic) cells.
struct ConditionalTable {
  int window_span = 0;  // T
  int k_global = 0;
  int k_local = 0;
  std::vector<double> prob;  // [o * (k_global + k_local) + cell]

  double global_cell(int o, int z) const {
    return prob[static_cast<std::size_t>(o) * (k_global + k_local) + z];
  }
  double local_cell(int o, int z) const {
    return prob[static_cast<std::size_t>(o) * (k_global + k_local) + k_global + z];
  }
};

/// Uniformly random assignments with all count tables built incrementally.
MgldaState init_state(const Corpus& corpus, const Hyperparams& hyper, std::uint64_t seed);

/// Sampling distribution for token i of document d with that token's current
/// assignment excluded from every count. The state is restored before return.
ConditionalTable conditional(MgldaState& state, std::size_t d, std::size_t i);

/// Reassigns one token, keeping every count table in step.
void set_token_assignment(MgldaState& state, std::size_t d, std::size_t i,
                          const Assignment& a);

/// Resamples every token once in corpus order (remove, sample, add) and
/// advances the iteration counter.
void gibbs_sweep(MgldaState& state);

/// One sampling pass over a single document's tokens, driven by `rng` instead
/// of the state's own stream. Building block for per-document resampling.
void sweep_document(MgldaState& state, std::size_t d, Rng& rng);

/// log P(words, windows, grains, topics) with the mixing distributions
/// integrated out; evaluated with log-gamma.
double log_joint(const MgldaState& state);

/// Smoothed word-in-topic rows: phi[z][w] proportional to count + beta.
TopicModel estimate_phi(const MgldaState& state);

/// Window-marginalized topic distribution of one sentence plus the
/// global/local mixture split. The two distributions are each normalized
/// within their granularity; the masses report the split between them.
struct SentenceTheta {
  std::vector<double> global_topics;
  std::vector<double> local_topics;
  double global_mass = 0.0;
  double local_mass = 0.0;
};
SentenceTheta estimate_theta_sentence(const MgldaState& state, std::size_t d, std::size_t s);

/// Brute recount of every table from the assignment array.
CountTables recount_tables(const MgldaState& state);

/// Throws std::logic_error when the incremental tables disagree with a recount.
void check_consistency(const MgldaState& state);

/// Runs `iterations` sweeps. When `per_sweep` is set it receives
/// (sweep index starting at 1, log_joint after that sweep).
void run_sweeps(MgldaState& state, int iterations,
                const std::function<void(int, double)>& per_sweep = {});

}  // namespace mgtm
