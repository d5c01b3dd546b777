#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mgtm {

/// Sparse binary feature vector: sorted unique keys, all with value 1.
using FeatureVector = std::vector<std::string>;

/// One aspect's linear scorer: weights plus k-1 ordered rating boundaries.
struct AspectRanker {
  std::unordered_map<std::string, double> weights;
  std::vector<double> boundaries;  // nondecreasing; implicit +inf above the last
};

/// Ordinal perceptron over a fixed aspect set. Ratings run 1..rating_levels.
struct RankerModel {
  int rating_levels = 5;
  std::vector<std::string> aspects;
  std::vector<AspectRanker> per_aspect;

  static RankerModel zero(std::vector<std::string> aspects, int rating_levels);
};

struct RatedInstance {
  FeatureVector features;
  std::vector<int> ratings;  // aligned to the model's aspect list
};

double score(const AspectRanker& ranker, const FeatureVector& x);

/// Smallest j with score < boundary j; rating_levels when the score clears
/// every boundary (strict inequality throughout).
int predict(const RankerModel& model, std::size_t aspect, const FeatureVector& x);

/// Mistake-driven ordinal perceptron step. Returns true when the model
/// changed. Ratings outside 1..rating_levels are rejected.
bool prank_update(RankerModel& model, std::size_t aspect, const FeatureVector& x, int y);

/// Online training in seeded shuffled order, all aspects per instance.
RankerModel train_ranker(const std::vector<RatedInstance>& instances,
                         std::vector<std::string> aspects, int rating_levels,
                         int epochs, std::uint64_t seed);

/// Mean absolute difference between true and predicted ratings.
double ranking_loss(std::span<const int> actual, std::span<const int> predicted);

/// Majority-rating baseline: always the top rating of a 1..5 scale.
int baseline_rate(const FeatureVector& x);

}  // namespace mgtm
