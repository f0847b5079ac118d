#pragma once

// LP-guided online algorithms: probing with permuted dependent rounding
// (PPDR), TSF for KIID arrivals, TSF-KAD with simulated availability
// probabilities, and the individual-to-group fairness reduction.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairmatch/benchmarks.hpp"
#include "fairmatch/episode.hpp"
#include "fairmatch/model.hpp"
#include "fairmatch/random.hpp"

namespace fairmatch {

/// Mixing weights on the operator, offline-fair and online-fair LP solutions.
struct Weights {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  [[nodiscard]] double sum() const { return alpha + beta + gamma; }
  [[nodiscard]] double of(Objective o) const;
  friend bool operator==(const Weights&, const Weights&) = default;
};

/// Throws std::invalid_argument unless all weights are in [0,1] and their sum
/// is at most 1 (+1e-12).
void validate_weights(const Weights& w);

/// Picks the LP solution an arrival follows, or nullopt for a rejection
/// (probability 1 - alpha - beta - gamma).
[[nodiscard]] std::optional<Objective> choose_objective(const Weights& w, Rng& rng);

/// Rounds `xv` (the LP values of the edges `edges` of the arriving type),
/// probes the selected edges in uniformly random order while their offline
/// endpoint is available, stopping at the first success or after `patience`
/// probes. Returns the matched edge. Throws std::invalid_argument when
/// sum(xv) exceeds the patience, which signals an infeasible LP vector.
std::optional<int> ppdr(std::span<const double> xv, std::span<const int> edges, Episode& episode, int patience,
                        Rng& rng);

// ---------------------------------------------------------------------------
// TSF (KIID)

/// Per-type LP vectors laid out for fast per-arrival lookup.
class TsfPolicy {
 public:
  /// `inst` must be a fragmented KIID instance and `bundle` its benchmarks.
  TsfPolicy(const Instance& inst, const BenchmarkBundle& bundle, Weights w);

  [[nodiscard]] const Instance& instance() const { return *inst_; }
  [[nodiscard]] RunTrace run(std::uint64_t seed) const;

 private:
  const Instance* inst_;
  Adjacency adj_;
  ArrivalSampler arrivals_;
  Weights w_;
  std::vector<std::vector<double>> xv_[3];  ///< [objective][type] aligned with adj_.by_online
};

[[nodiscard]] RunTrace run_tsf(const Instance& inst, const BenchmarkBundle& bundle, Weights w, std::uint64_t seed);

// ---------------------------------------------------------------------------
// TSF-KAD

/// Estimated probability that the offline endpoint of each edge is still
/// unmatched at the start of each round.
struct RhoTable {
  int rounds = 0;
  int simulations = 0;
  Weights weights;
  double lambda = 0.5;
  std::vector<double> by_offline;  ///< [u * rounds + t]
  std::vector<int> edge_offline;   ///< endpoint of each edge

  [[nodiscard]] double offline(int u, int t) const {
    return by_offline[static_cast<std::size_t>(u) * static_cast<std::size_t>(rounds) + static_cast<std::size_t>(t)];
  }
  [[nodiscard]] double at(int e, int t) const { return offline(edge_offline[static_cast<std::size_t>(e)], t); }

  /// All-ones table (exact before any round has been played).
  static RhoTable ones(const Instance& inst, Weights w, double lambda);
};

inline constexpr double kDefaultLambda = 0.5;
inline constexpr int kDefaultRhoSimulations = 1000;

class TsfKadPolicy {
 public:
  /// `inst` must be KAD with p_e = 1 and `bundle` its benchmarks.
  TsfKadPolicy(const Instance& inst, const BenchmarkBundle& bundle, Weights w, double lambda = kDefaultLambda);

  [[nodiscard]] const Instance& instance() const { return *inst_; }
  [[nodiscard]] Weights weights() const { return w_; }
  [[nodiscard]] double lambda() const { return lambda_; }

  /// Plays round t for the arrival already registered in `episode`.
  void play_round(int t, int type, const RhoTable& rho, Episode& episode, Rng& rng) const;

  /// One full episode; throws std::invalid_argument if `rho` was estimated
  /// for different weights, lambda, or horizon.
  [[nodiscard]] RunTrace run(const RhoTable& rho, std::uint64_t seed) const;

  [[nodiscard]] const ArrivalSampler& arrivals() const { return arrivals_; }

 private:
  const Instance* inst_;
  Adjacency adj_;
  ArrivalSampler arrivals_;
  Weights w_;
  double lambda_;
  const BenchmarkBundle* bundle_;
};

/// Forward simulation: rho[., 0] = 1; with rho fixed through round t, S
/// simulated prefixes are advanced through round t and rho[., t+1] is the
/// fraction in which the vertex is still unmatched. The S prefixes are
/// carried forward from one round to the next. Throws for S < 1.
[[nodiscard]] RhoTable estimate_rho(const TsfKadPolicy& policy, int simulations, std::uint64_t seed,
                                    Execution exec = Execution::Parallel);

[[nodiscard]] RunTrace run_tsf_kad(const Instance& inst, const BenchmarkBundle& bundle, Weights w,
                                   const RhoTable& rho, std::uint64_t seed, double lambda = kDefaultLambda);

// ---------------------------------------------------------------------------

/// KAD instance whose group-fairness objectives equal the individual
/// fairness objectives of `inst`: each offline vertex becomes its own group,
/// and the online side is replicated into one block per round, block t
/// arriving only in round t and forming its own group.
[[nodiscard]] Instance reduce_individual_to_group(const Instance& inst);

}  // namespace fairmatch
