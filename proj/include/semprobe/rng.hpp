#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "semprobe/matrix.hpp"

namespace semprobe {

/// Deterministic random source. Every randomized routine in the toolkit
/// draws through this wrapper, so results depend only on the seed and not
/// on the standard library's (implementation-defined) distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0, n).
  Index index(Index n) {
    if (n < 1) throw std::invalid_argument("Rng::index: n must be positive");
    const Index i = static_cast<Index>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  /// Standard normal via Box-Muller; the second value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    do {
      u = uniform();
    } while (u == 0.0);
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Fisher-Yates shuffle driven by this engine.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (Index i = static_cast<Index>(v.size()) - 1; i > 0; --i) {
      const Index j = index(i + 1);
      std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
    }
  }

  /// Index drawn with probability proportional to weights[i]. Zero-weight
  /// entries are never selected; a non-positive total is an error.
  template <class Derived>
  Index weighted_index(const Eigen::DenseBase<Derived>& weights) {
    const double total = static_cast<double>(weights.sum());
    if (!(total > 0.0))
      throw std::invalid_argument("Rng::weighted_index: total weight must be positive");
    const double u = uniform() * total;
    double acc = 0.0;
    Index last_positive = -1;
    for (Index i = 0; i < weights.size(); ++i) {
      const double w = static_cast<double>(weights(i));
      if (w <= 0.0) continue;
      last_positive = i;
      acc += w;
      if (acc > u) return i;
    }
    return last_positive;  // u landed on the rounding tail
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace semprobe
