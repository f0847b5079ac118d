#pragma once

// Sparse linear programs (maximization) and a dense bounded-variable primal
// simplex solver.

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fairmatch/kernels.hpp"

namespace fairmatch {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
  std::string name;
};

/// maximize objective . x  subject to constraints and lower <= x <= upper.
/// Lower bounds must be finite; upper bounds may be kInf.
struct LpProgram {
  std::vector<std::string> names;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Term> objective;
  std::vector<Constraint> constraints;
  /// Non-fatal notes from construction (e.g. groups dropped from a max-min).
  std::vector<std::string> warnings;

  int add_variable(std::string name, double lo, double hi, double objective_coef = 0.0);
  void add_constraint(std::vector<Term> terms, Relation rel, double rhs, std::string name = {});
  [[nodiscard]] int num_variables() const { return static_cast<int>(names.size()); }
};

/// Well-formedness problems: undeclared variables, lo > hi, infinite lower
/// bounds, non-finite coefficients. Empty when the program can be solved.
[[nodiscard]] std::vector<std::string> check_program(const LpProgram& prog);

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

[[nodiscard]] const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  int iterations = 0;

  [[nodiscard]] bool optimal() const { return status == LpStatus::Optimal; }
};

struct SolverOptions {
  Execution execution = Execution::Parallel;
  int max_iterations = 0;  ///< 0 picks a limit from the problem size
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
};

/// Throws std::invalid_argument for ill-formed programs; infeasible and
/// unbounded programs are reported through the status.
[[nodiscard]] LpSolution solve_lp(const LpProgram& prog, SolverOptions opts = {});

/// Largest violation of any row or bound by x, computed from the program
/// alone (independent of the solver's internal state).
[[nodiscard]] double max_violation(const LpProgram& prog, std::span<const double> x);

[[nodiscard]] double evaluate_objective(const LpProgram& prog, std::span<const double> x);

}  // namespace fairmatch
