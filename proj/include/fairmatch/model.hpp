#pragma once

// Three-sided online matching instances, simulated episodes, and the
// Monte-Carlo evaluators for the operator / offline / online objectives.
//
// Rounds are 0-based throughout the library: round t in [0, horizon).

#include <span>
#include <string>
#include <vector>

namespace fairmatch {

enum class ArrivalModel { Kiid, Kad };

using GroupId = int;  ///< index into Instance::groups

struct OfflineVertex {
  int id = 0;
  GroupId group = 0;
  int patience = 1;  ///< failed probes tolerated over the whole horizon
};

struct OnlineType {
  int id = 0;
  GroupId group = 0;
  int patience = 1;     ///< failed probes tolerated within the arrival round
  double p = 0.0;       ///< KIID stationary arrival probability
  std::vector<double> p_t;  ///< KAD per-round arrival probabilities, size horizon
  int origin = -1;      ///< source type when produced by a transformation
};

struct Edge {
  int u = 0;
  int v = 0;
  double success_prob = 1.0;
  double w_op = 0.0;
  double w_off = 0.0;
  double w_on = 0.0;
};

struct Instance {
  std::vector<OfflineVertex> offline;
  std::vector<OnlineType> online;
  std::vector<Edge> edges;
  int horizon = 1;
  ArrivalModel arrival_model = ArrivalModel::Kiid;
  std::vector<std::string> groups;
  /// Constant added to utilities during ingestion; 0 for hand-built instances.
  double utility_shift = 0.0;

  /// Probability that type v arrives in round t.
  [[nodiscard]] double arrival_prob(int v, int t) const;
};

/// Incident edge lists, by offline vertex and by online type.
struct Adjacency {
  std::vector<std::vector<int>> by_offline;
  std::vector<std::vector<int>> by_online;

  explicit Adjacency(const Instance& inst);
};

struct Violation {
  std::string field;
  std::string rule;
};

struct ValidationOptions {
  /// Flag KAD instances whose edges are not all p_e = 1 (needed by TSF-KAD).
  bool require_unit_success_for_kad = false;
};

inline constexpr double kArrivalMassTolerance = 1e-9;

[[nodiscard]] std::vector<Violation> validate_instance(const Instance& inst,
                                                       ValidationOptions opts = {});

/// Throws std::invalid_argument listing every violation, if any.
void require_valid(const Instance& inst, ValidationOptions opts = {});

/// n_v: T * p_v (KIID) or sum_t p_{v,t} (KAD). Throws std::out_of_range.
[[nodiscard]] double expected_arrivals(const Instance& inst, int v);

/// Splits every KIID type with n_v = k into k unit types (p = 1/T each).
/// Throws std::invalid_argument for KAD input or non-integral n_v.
[[nodiscard]] Instance fragment_types(const Instance& inst);

[[nodiscard]] bool is_fragmented(const Instance& inst, double tol = 1e-9);

/// Same instance viewed as KAD, p_{v,t} = p_v for every round. KAD input is
/// returned unchanged.
[[nodiscard]] Instance as_kad(const Instance& inst);

// ---------------------------------------------------------------------------
// Episodes

struct Probe {
  int edge = 0;
  bool success = false;
};

struct RoundEvent {
  int round = 0;
  int type = 0;  ///< online type that arrived
  std::vector<Probe> probes;
};

struct RunTrace {
  std::vector<RoundEvent> events;
  double op_utility = 0.0;
  std::vector<double> off_utility;  ///< per offline vertex
  std::vector<double> on_utility;   ///< per round
  int clamped_probes = 0;  ///< probe probabilities clipped to [0,1] (TSF-KAD)
};

/// Checks the episode invariants (one success per round, patience limits, no
/// probe to a departed vertex) and that the realized utilities are the edge
/// weight sums over successful probes. Returns one message per breach.
[[nodiscard]] std::vector<std::string> check_trace(const Instance& inst, const RunTrace& trace);

/// For each offline vertex, the first round at whose start it is no longer
/// available (matched or out of patience); horizon if it survives.
[[nodiscard]] std::vector<int> departure_rounds(const Instance& inst, const RunTrace& trace);

// ---------------------------------------------------------------------------
// Objectives

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  int argmin = -1;  ///< group / vertex / round attaining the min, when a min is taken
};

struct ObjectiveEstimate {
  Estimate profit;
  Estimate offline_group;
  Estimate online_group;
  Estimate offline_individual;
  Estimate online_individual;
};

/// Sample mean and standard error of the mean.
[[nodiscard]] Estimate mean_estimate(std::span<const double> samples);

/// Monte-Carlo estimates over independent traces of the same instance.
/// Groups with no members on a side are skipped on that side.
/// Throws std::invalid_argument on an empty trace list.
[[nodiscard]] ObjectiveEstimate evaluate_objectives(const Instance& inst,
                                                    std::span<const RunTrace> traces);

}  // namespace fairmatch
