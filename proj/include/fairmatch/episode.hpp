#pragma once

// Shared simulation machinery: per-vertex availability, arrival sampling and
// the probe bookkeeping every online algorithm goes through.

#include <vector>

#include "fairmatch/model.hpp"
#include "fairmatch/random.hpp"

namespace fairmatch {

/// Matched flags and failed-probe counters of the offline side. A vertex is
/// available while unmatched and below its patience.
class AvailabilityState {
 public:
  explicit AvailabilityState(const Instance& inst);

  [[nodiscard]] bool available(int u) const {
    const auto i = static_cast<std::size_t>(u);
    return !matched_[i] && failed_[i] < patience_[i];
  }
  [[nodiscard]] bool matched(int u) const { return matched_[static_cast<std::size_t>(u)] != 0; }
  [[nodiscard]] int failed_probes(int u) const { return failed_[static_cast<std::size_t>(u)]; }

  /// Precondition: available(u).
  void record(int u, bool success);

 private:
  std::vector<char> matched_;
  std::vector<int> failed_;
  std::vector<int> patience_;
};

/// Draws the arriving type of each round by inverse CDF.
class ArrivalSampler {
 public:
  explicit ArrivalSampler(const Instance& inst);
  [[nodiscard]] int sample(int round, Rng& rng) const;

 private:
  bool stationary_ = true;
  std::vector<std::vector<double>> cdf_;  ///< one CDF (KIID) or one per round
};

/// One simulated episode in progress.
class Episode {
 public:
  explicit Episode(const Instance& inst);

  void begin_round(int round, int type);
  /// Probes edge e of the current arrival; success with p_e. The offline
  /// endpoint must be available.
  bool probe(int e, Rng& rng);
  [[nodiscard]] const Instance& instance() const { return *inst_; }
  [[nodiscard]] const AvailabilityState& state() const { return state_; }
  /// Whether the offline endpoint of edge e can still be probed.
  [[nodiscard]] bool edge_available(int e) const {
    return state_.available(inst_->edges[static_cast<std::size_t>(e)].u);
  }
  [[nodiscard]] const RunTrace& trace() const { return trace_; }
  RunTrace& mutable_trace() { return trace_; }
  [[nodiscard]] RunTrace finish() && { return std::move(trace_); }

 private:
  const Instance* inst_;
  AvailabilityState state_;
  RunTrace trace_;
};

}  // namespace fairmatch
