#pragma once

// Dependent rounding of a fractional vector (star-graph case): marginals are
// preserved, the rounded sum is floor(k) or ceil(k) for k = sum x_i, and the
// coordinates are negatively correlated.

#include <span>
#include <vector>

#include "fairmatch/random.hpp"

namespace fairmatch {

/// Entries within this distance of 0 or 1 count as integral.
inline constexpr double kIntegralityTol = 1e-12;

struct RoundedVector {
  std::vector<char> bits;  ///< 0/1, aligned with the input
  double input_sum = 0.0;

  [[nodiscard]] int count() const;
};

/// Repeatedly picks the first two fractional coordinates (ascending index)
/// and shifts mass between them until at most one fractional coordinate is
/// left, which is then rounded on its own. Throws std::invalid_argument if
/// some x_i lies outside [0, 1].
[[nodiscard]] RoundedVector dependent_round(std::span<const double> x, Rng& rng);

/// Uniformly random permutation of 0..n-1 (Fisher-Yates).
[[nodiscard]] std::vector<int> random_permutation(int n, Rng& rng);

}  // namespace fairmatch
