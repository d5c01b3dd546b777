#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mgtm {

/// Seeded random stream. All sampling is routed through the helpers below
/// instead of std <random> distributions, whose output is implementation
/// defined; this keeps runs reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

  /// Standard normal via Box-Muller.
  double normal();

  /// Gamma(shape, 1), Marsaglia-Tsang squeeze with the shape < 1 boost.
  double gamma(double shape);

  /// Beta(a, b) as a gamma ratio.
  double beta(double a, double b);

  /// Dirichlet with symmetric concentration alpha, dimension k.
  std::vector<double> dirichlet(std::size_t k, double alpha);

  /// Index i with probability weights[i] / sum(weights). Weights >= 0, sum > 0.
  std::size_t categorical(std::span<const double> weights);

  /// Fisher-Yates shuffle driven by this stream.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_int(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 fold of (seed, stream); derives independent child streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mgtm
