#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgtm/features.hpp"
#include "mgtm/ranker.hpp"

namespace mgtm {

struct RankExperimentConfig {
  int buckets = 5;
  int top_k = 3;
  int epochs = 10;
  double train_fraction = 0.8;
  int repeats = 5;
  int rating_levels = 5;
  int ngram_order = 3;  // 1 = unigrams, 2 = +bigrams, 3 = +frequent trigrams
  int trigram_min_df = 5;
  std::uint64_t seed = 1;
};

struct RankRow {
  std::string name;
  double overall = 0.0;
  std::vector<double> per_aspect;
};

struct RankReport {
  std::vector<std::string> aspects;
  std::vector<RankRow> rows;  // Baseline, PRank, and PRank+<model> when given
};

/// Repeated split / train / evaluate over the rated documents of a corpus.
/// Always produces the constant-rating baseline and the n-gram-only ranker;
/// when `profiles` is nonnull a third ranker with topic conjunction features
/// (tagged `model_tag`) is evaluated as well. Losses are averaged over
/// `repeats` seeded splits.
RankReport run_rank_experiment(
    const Corpus& corpus,
    const std::vector<std::vector<SentenceTopicProfile>>* profiles,
    const std::string& model_tag, const RankExperimentConfig& config,
    RankerModel* trained_model = nullptr, Bucketizer* used_buckets = nullptr,
    FeatureConfig* used_config = nullptr);

/// Paper-style table: one row per model, overall column then one per aspect.
std::string rank_report_tsv(const RankReport& report);

}  // namespace mgtm
