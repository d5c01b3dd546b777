#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mgtm/lda.hpp"
#include "mgtm/mglda.hpp"

namespace mgtm {

/// Per-sentence topic probabilities averaged over resamples. For the
/// multi-grain model the table covers local topics only (probabilities may
/// sum below 1 when part of the sentence is assigned globally); for LDA it
/// covers all topics.
struct SentenceTopicProfile {
  std::string doc_id;
  std::uint32_t sentence = 0;
  std::vector<double> probs;
};

/// Receives each raw per-sample count table, laid out [sentence * k + topic].
using SampleSink = std::function<void(std::span<const int>)>;

/// Resamples only document d's tokens `samples` times with every other
/// document frozen, recording per-sentence per-topic assignment counts after
/// each pass. The state is restored bit-identically before returning.
/// Probability = mean count / sentence length (zero for empty sentences).
/// One resampling job per state at a time (the shared tables are mutated and
/// restored in place).
std::vector<SentenceTopicProfile> resample_doc(MgldaState& state, std::size_t d,
                                               int samples, std::uint64_t seed,
                                               const SampleSink& sink = {});

std::vector<SentenceTopicProfile> resample_doc(LdaState& state, std::size_t d,
                                               int samples, std::uint64_t seed,
                                               const SampleSink& sink = {});

/// Profiles for every document, one derived stream per document.
std::vector<std::vector<SentenceTopicProfile>> resample_all(MgldaState& state,
                                                            int samples,
                                                            std::uint64_t seed);
std::vector<std::vector<SentenceTopicProfile>> resample_all(LdaState& state,
                                                            int samples,
                                                            std::uint64_t seed);

/// Quantile discretizer. Thresholds sit at the j/buckets percentiles of the
/// nonzero values seen at fit time; bucket(p) counts thresholds strictly
/// below p, so ties fall into the lower bucket.
struct Bucketizer {
  std::vector<double> thresholds;

  int bucket(double p) const {
    int b = 0;
    for (double t : thresholds) {
      if (t < p) ++b;
    }
    return b;
  }
};

Bucketizer fit_bucketizer(const std::vector<double>& values, int buckets = 5);

/// Pools every probability entry of the given profiles (fit input).
std::vector<double> pool_profile_values(
    const std::vector<std::vector<SentenceTopicProfile>>& profiles);

struct FeatureConfig {
  bool unigrams = true;
  bool bigrams = true;
  bool trigrams = true;
  int top_k = 3;              // topics per sentence for conjunction features
  std::string model_tag;      // "mg" or "lda"; empty disables topic features
};

/// Trigrams whose document frequency is at least min_df, joined with '_'.
std::unordered_set<std::string> frequent_trigrams(const Corpus& corpus,
                                                  std::span<const std::size_t> doc_ids,
                                                  int min_df = 5);

/// Sparse binary feature keys for one document: n-grams over its sentences
/// plus, for each sentence's top-k nonzero topics, one conjunction feature
/// "<token>&<tag>&t<topic>&b<bucket>" per token of the sentence. Sorted and
/// unique.
std::vector<std::string> make_features(const Document& doc, const Vocabulary& vocab,
                                       const std::vector<SentenceTopicProfile>& profiles,
                                       const Bucketizer& buckets,
                                       const std::unordered_set<std::string>& trigram_vocab,
                                       const FeatureConfig& config);

/// JSON-lines export, one line per sentence: {"doc":…, "sentence":…, "probs":[…]}.
void save_profiles_jsonl(const std::vector<std::vector<SentenceTopicProfile>>& profiles,
                         const std::string& path);

/// Sparse text export of labeled feature vectors, "label idx:1 idx:1 …" with
/// 1-based indices. One file per label column ("<path>.<name>") plus the
/// shared index dictionary at "<path>.vocab" (line number = index).
void save_sparse_features(const std::vector<std::vector<std::string>>& features,
                          const std::vector<std::vector<int>>& labels,
                          const std::vector<std::string>& label_names,
                          const std::string& path);

}  // namespace mgtm
