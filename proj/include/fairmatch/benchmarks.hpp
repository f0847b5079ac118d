#pragma once

// Benchmark LPs whose optima upper-bound the expected value any online
// algorithm attains on each of the three objectives.
//
// KIID (fragmented types, n_v = 1), variables x_e = expected probes of e:
//   0 <= x_e <= 1
//   sum_{e in E_u} x_e p_e <= 1,  sum_{e in E_u} x_e <= patience_u
//   sum_{e in E_v} x_e p_e <= 1,  sum_{e in E_v} x_e <= patience_v
// KAD (p_e = 1), variables x_{e,t} = probability e is matched in round t:
//   0 <= x_{e,t} <= 1
//   sum_t sum_{e in E_u} x_{e,t} <= 1,  sum_{e in E_v} x_{e,t} <= p_{v,t}
//
// Max-min objectives use an auxiliary eta >= 0 with one row per group,
//   eta <= (group utility) / (|U(g)|  or  sum_{v in V(g)} n_v).

#include <string>
#include <vector>

#include "fairmatch/lp.hpp"
#include "fairmatch/model.hpp"

namespace fairmatch {

enum class Objective { Operator, OfflineFair, OnlineFair };
enum class Side { Offline, Online };

[[nodiscard]] const char* to_string(Objective o);

enum class KiidForm {
  Fragmented,  ///< requires n_v = 1 for every type
  Aggregated,  ///< any integral n_v; type rows are scaled by n_v
};

struct BenchmarkLp {
  LpProgram program;
  int rounds = 1;  ///< 1 for KIID, horizon for KAD
  /// Variable of edge e in round t at [e * rounds + t]; -1 when the variable
  /// is structurally zero (KAD rounds where the type never arrives).
  std::vector<int> edge_var;
  int eta = -1;
};

[[nodiscard]] BenchmarkLp build_kiid_lp(const Instance& inst, Objective obj,
                                        KiidForm form = KiidForm::Fragmented);
[[nodiscard]] BenchmarkLp build_kad_lp(const Instance& inst, Objective obj);

/// Individual max-min fairness LP in the KAD formulation (KIID input is read
/// as stationary KAD): offline rows eta <= utility of u for every u, online
/// rows eta <= expected utility of the round-t arrival for every t.
/// Requires p_e = 1.
[[nodiscard]] BenchmarkLp build_individual_lp(const Instance& inst, Side side);

struct BenchmarkSolution {
  LpSolution lp;
  int rounds = 1;
  std::vector<double> edge_values;  ///< [e * rounds + t]

  [[nodiscard]] double value(int e, int t = 0) const {
    return edge_values[static_cast<std::size_t>(e) * static_cast<std::size_t>(rounds) +
                       static_cast<std::size_t>(rounds == 1 ? 0 : t)];
  }
};

/// Solves and unpacks; throws std::runtime_error unless the LP is optimal.
[[nodiscard]] BenchmarkSolution solve_benchmark(const BenchmarkLp& lp, SolverOptions opts = {});

struct BenchmarkBundle {
  ArrivalModel model = ArrivalModel::Kiid;
  BenchmarkSolution x_star;  ///< operator profit
  BenchmarkSolution y_star;  ///< offline group fairness
  BenchmarkSolution z_star;  ///< online group fairness
  double opt_op = 0.0;
  double opt_off = 0.0;
  double opt_on = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] const BenchmarkSolution& solution(Objective o) const;
  [[nodiscard]] double opt(Objective o) const;
};

/// All three benchmark LPs of a valid instance. KIID instances use the
/// aggregated form (identical to the fragmented one when every n_v = 1);
/// KAD instances must have p_e = 1. The three solves run in
/// parallel when `exec` is Parallel.
[[nodiscard]] BenchmarkBundle benchmarks(const Instance& inst, Execution exec = Execution::Parallel);

/// Benchmarks of `fragmented` (= fragment_types(inst)) obtained from the
/// smaller aggregated LPs of `inst`: each type's solution is split evenly
/// over its unit copies, which is optimal for the fragmented LPs by symmetry.
[[nodiscard]] BenchmarkBundle fragmented_benchmarks(const Instance& inst, const Instance& fragmented,
                                                    Execution exec = Execution::Parallel);

struct IndividualOptima {
  double offline = 0.0;
  double online = 0.0;
};

[[nodiscard]] IndividualOptima individual_optima(const Instance& inst);

/// Group utility expressions of an LP solution, for checking the max-min
/// linearization: min over non-degenerate groups of the per-group average.
[[nodiscard]] double min_group_average(const Instance& inst, const BenchmarkLp& lp,
                                       const BenchmarkSolution& sol, Side side);

}  // namespace fairmatch
