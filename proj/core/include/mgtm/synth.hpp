#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgtm/corpus.hpp"
#include "mgtm/mglda.hpp"

namespace mgtm {

/// Forward sampler of the multi-grain generative process. Topic-word rows are
/// drawn from a sparse Dirichlet so they come out peaked.
struct SynthConfig {
  int documents = 500;
  int sentences_per_doc = 8;
  int tokens_per_sentence = 8;
  int vocab_size = 40;
  double phi_concentration = 0.05;
  Hyperparams hyper;  // k_global, k_local, window and the priors
  std::uint64_t seed = 1;
};

struct SynthOutput {
  std::vector<RawDocument> documents;
  std::vector<std::string> vocabulary;          // term strings, generator order
  std::vector<std::vector<double>> phi_global;  // ground truth, rows sum to 1
  std::vector<std::vector<double>> phi_local;
};

SynthOutput generate_synthetic(const SynthConfig& config);

/// Labeled review generator: six aspects, each tied to one planted local
/// topic block; shared positive/negative sentiment words co-occur with a
/// sentence's aspect words and drive that aspect's rating, with label noise.
/// Brand sentences give the corpus document-wide structure.
struct RatedSynthConfig {
  int documents = 400;
  int brands = 4;
  int content_words_per_aspect = 6;
  int brand_words = 6;
  int sentiment_words = 5;  // per polarity
  int content_tokens_per_sentence = 5;
  int sentiment_tokens_per_sentence = 3;
  int brand_tokens_per_sentence = 6;
  double noise = 0.1;  // chance a sentiment token flips polarity
  std::uint64_t seed = 1;
};

/// Aspect names in reporting order.
const std::vector<std::string>& rated_aspects();

SynthOutput generate_rated(const RatedSynthConfig& config);

/// Writes JSON-lines documents compatible with the ingest stage.
void save_documents_jsonl(const std::vector<RawDocument>& docs, const std::string& path);

/// Writes vocabulary plus ground-truth topic rows.
void save_truth(const SynthOutput& out, const std::string& path);

}  // namespace mgtm
