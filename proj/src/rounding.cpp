#include "fairmatch/rounding.hpp"

#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fairmatch {

int RoundedVector::count() const {
  int c = 0;
  for (char b : bits) c += b;
  return c;
}

namespace {

bool fractional(double v) { return v > kIntegralityTol && v < 1.0 - kIntegralityTol; }

}  // namespace

RoundedVector dependent_round(std::span<const double> x, Rng& rng) {
  RoundedVector out;
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
      throw std::invalid_argument("dependent_round: x[" + std::to_string(i) + "] = " + std::to_string(y[i]) +
                                  " outside [0,1]");
    }
    out.input_sum += y[i];
  }

  std::size_t i = 0;
  while (true) {
    while (i < y.size() && !fractional(y[i])) ++i;
    std::size_t j = i + 1;
    while (j < y.size() && !fractional(y[j])) ++j;
    if (j >= y.size()) break;

    // Move along (+a, -a) or (-b, +b); each step makes one entry integral.
    const double a = std::min(1.0 - y[i], y[j]);
    const double b = std::min(y[i], 1.0 - y[j]);
    [[maybe_unused]] const double pair_sum = y[i] + y[j];
    if (uniform01(rng) < b / (a + b)) {
      y[i] += a;
      y[j] -= a;
    } else {
      y[i] -= b;
      y[j] += b;
    }
    assert(std::abs(y[i] + y[j] - pair_sum) < 1e-9);
    if (!fractional(y[i])) ++i;
  }
  // At most one fractional entry remains.
  if (i < y.size() && fractional(y[i])) y[i] = uniform01(rng) < y[i] ? 1.0 : 0.0;

  out.bits.resize(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) out.bits[k] = y[k] > 0.5 ? 1 : 0;
  return out;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = perm.size(); k > 1; --k) {
    const auto r = static_cast<std::size_t>(uniform_index(rng, k));
    std::swap(perm[k - 1], perm[r]);
  }
  return perm;
}

}  // namespace fairmatch
