#include "mgtm/ranker.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mgtm/rng.hpp"

namespace mgtm {

RankerModel RankerModel::zero(std::vector<std::string> aspects, int rating_levels) {
  if (rating_levels < 2) throw std::invalid_argument("rating_levels must be >= 2");
  RankerModel m;
  m.rating_levels = rating_levels;
  m.aspects = std::move(aspects);
  m.per_aspect.resize(m.aspects.size());
  for (auto& a : m.per_aspect) {
    a.boundaries.assign(rating_levels - 1, 0.0);
  }
  return m;
}

double score(const AspectRanker& ranker, const FeatureVector& x) {
  double s = 0.0;
  for (const auto& f : x) {
    auto it = ranker.weights.find(f);
    if (it != ranker.weights.end()) s += it->second;
  }
  return s;
}

namespace {

int predict_from_score(const AspectRanker& ranker, double s, int rating_levels) {
  for (int j = 1; j < rating_levels; ++j) {
    if (s < ranker.boundaries[j - 1]) return j;
  }
  return rating_levels;
}

}  // namespace

int predict(const RankerModel& model, std::size_t aspect, const FeatureVector& x) {
  const AspectRanker& r = model.per_aspect.at(aspect);
  return predict_from_score(r, score(r, x), model.rating_levels);
}

bool prank_update(RankerModel& model, std::size_t aspect, const FeatureVector& x, int y) {
  if (y < 1 || y > model.rating_levels) {
    throw std::invalid_argument("prank_update: rating " + std::to_string(y) +
                                " outside 1.." + std::to_string(model.rating_levels));
  }
  AspectRanker& r = model.per_aspect.at(aspect);
  const double s = score(r, x);
  if (predict_from_score(r, s, model.rating_levels) == y) return false;

  // A boundary is moved when the score sits on the wrong side of it (ties
  // count as wrong); the weights take the summed correction.
  int tau_sum = 0;
  for (int j = 1; j < model.rating_levels; ++j) {
    const int dir = y > j ? 1 : -1;
    if ((s - r.boundaries[j - 1]) * dir <= 0) {
      tau_sum += dir;
      r.boundaries[j - 1] -= dir;
    }
  }
  if (tau_sum != 0) {
    for (const auto& f : x) r.weights[f] += tau_sum;
  }
  assert(std::is_sorted(r.boundaries.begin(), r.boundaries.end()));
  return true;
}

RankerModel train_ranker(const std::vector<RatedInstance>& instances,
                         std::vector<std::string> aspects, int rating_levels,
                         int epochs, std::uint64_t seed) {
  if (instances.empty()) throw std::invalid_argument("train_ranker: no instances");
  for (const auto& inst : instances) {
    if (inst.ratings.size() != aspects.size()) {
      throw std::invalid_argument("train_ranker: instance ratings do not cover the aspect set");
    }
  }
  RankerModel model = RankerModel::zero(std::move(aspects), rating_levels);
  Rng rng(seed);
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const RatedInstance& inst = instances[idx];
      for (std::size_t a = 0; a < model.aspects.size(); ++a) {
        prank_update(model, a, inst.features, inst.ratings[a]);
      }
    }
  }
  return model;
}

double ranking_loss(std::span<const int> actual, std::span<const int> predicted) {
  if (actual.size() != predicted.size()) {
    throw std::invalid_argument("ranking_loss: length mismatch");
  }
  if (actual.empty()) throw std::invalid_argument("ranking_loss: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    total += std::abs(actual[i] - predicted[i]);
  }
  return total / static_cast<double>(actual.size());
}

int baseline_rate(const FeatureVector&) { return 5; }

}  // namespace mgtm
