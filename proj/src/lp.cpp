#include "fairmatch/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairmatch {

int LpProgram::add_variable(std::string name, double lo, double hi, double objective_coef) {
  const int id = num_variables();
  names.push_back(std::move(name));
  lower.push_back(lo);
  upper.push_back(hi);
  if (objective_coef != 0.0) objective.push_back({id, objective_coef});
  return id;
}

void LpProgram::add_constraint(std::vector<Term> terms, Relation rel, double rhs, std::string name) {
  constraints.push_back({std::move(terms), rel, rhs, std::move(name)});
}

std::vector<std::string> check_program(const LpProgram& prog) {
  std::vector<std::string> out;
  const int n = prog.num_variables();
  if (prog.lower.size() != prog.names.size() || prog.upper.size() != prog.names.size()) {
    out.emplace_back("bounds arrays do not match the variable count");
    return out;
  }
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (!std::isfinite(prog.lower[uj])) out.push_back("variable " + prog.names[uj] + ": lower bound must be finite");
    if (std::isnan(prog.upper[uj]) || prog.lower[uj] > prog.upper[uj]) {
      out.push_back("variable " + prog.names[uj] + ": lower bound exceeds upper bound");
    }
  }
  auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n) out.push_back(where + ": undeclared variable " + std::to_string(t.var));
      if (!std::isfinite(t.coef)) out.push_back(where + ": non-finite coefficient");
    }
  };
  check_terms(prog.objective, "objective");
  for (std::size_t i = 0; i < prog.constraints.size(); ++i) {
    const auto& c = prog.constraints[i];
    const std::string where = c.name.empty() ? "row " + std::to_string(i) : c.name;
    check_terms(c.terms, where);
    if (!std::isfinite(c.rhs)) out.push_back(where + ": non-finite right-hand side");
  }
  return out;
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

double evaluate_objective(const LpProgram& prog, std::span<const double> x) {
  double v = 0.0;
  for (const auto& t : prog.objective) v += t.coef * x[static_cast<std::size_t>(t.var)];
  return v;
}

double max_violation(const LpProgram& prog, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < prog.names.size(); ++j) {
    worst = std::max(worst, prog.lower[j] - x[j]);
    if (std::isfinite(prog.upper[j])) worst = std::max(worst, x[j] - prog.upper[j]);
  }
  for (const auto& c : prog.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
    switch (c.relation) {
      case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

namespace {

// Dense tableau over shifted variables x' = x - lower, with one slack or
// surplus per inequality row and one artificial per row whose slack cannot
// start basic. The last tableau row holds the reduced costs of the current
// phase objective.
class BoundedSimplex {
 public:
  BoundedSimplex(const LpProgram& prog, const SolverOptions& opts) : prog_(prog), opts_(opts) {
    n_ = static_cast<std::size_t>(prog.num_variables());
    m_ = prog.constraints.size();

    std::size_t slacks = 0;
    for (const auto& c : prog.constraints) slacks += c.relation != Relation::Equal ? 1 : 0;

    // Row right-hand sides after shifting and sign normalization.
    std::vector<double> rhs(m_);
    std::vector<double> sign(m_, 1.0);
    std::vector<double> slack_coef(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& c = prog.constraints[i];
      double b = c.rhs;
      for (const auto& t : c.terms) b -= t.coef * prog.lower[static_cast<std::size_t>(t.var)];
      if (c.relation == Relation::LessEqual) slack_coef[i] = 1.0;
      if (c.relation == Relation::GreaterEqual) slack_coef[i] = -1.0;
      if (b < 0) {
        sign[i] = -1.0;
        b = -b;
      }
      rhs[i] = b;
    }
    std::size_t artificials = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (sign[i] * slack_coef[i] <= 0.0) ++artificials;
    }

    first_slack_ = n_;
    first_artificial_ = n_ + slacks;
    cols_ = n_ + slacks + artificials;
    tab_.assign((m_ + 1) * cols_, 0.0);
    upper_.assign(cols_, kInf);
    at_upper_.assign(cols_, false);
    is_basic_.assign(cols_, false);
    basis_.assign(m_, 0);
    beta_.assign(m_, 0.0);

    for (std::size_t j = 0; j < n_; ++j) upper_[j] = prog.upper[j] - prog.lower[j];

    std::size_t next_slack = first_slack_;
    std::size_t next_art = first_artificial_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& c = prog.constraints[i];
      double* row = &tab_[i * cols_];
      for (const auto& t : c.terms) row[static_cast<std::size_t>(t.var)] += sign[i] * t.coef;
      std::size_t slack_col = cols_;
      if (slack_coef[i] != 0.0) {
        slack_col = next_slack++;
        row[slack_col] = sign[i] * slack_coef[i];
      }
      beta_[i] = rhs[i];
      if (slack_col != cols_ && row[slack_col] > 0.0) {
        basis_[i] = slack_col;
      } else {
        const std::size_t a = next_art++;
        row[a] = 1.0;
        basis_[i] = a;
      }
      is_basic_[basis_[i]] = true;
    }

    max_iter_ = opts.max_iterations > 0 ? opts.max_iterations
                                        : static_cast<int>(std::min<std::size_t>(2000000, 50 * (m_ + cols_) + 1000));
  }

  LpSolution run() {
    LpSolution sol;
    if (first_artificial_ < cols_) {
      std::vector<double> cost(cols_, 0.0);
      for (std::size_t j = first_artificial_; j < cols_; ++j) cost[j] = -1.0;
      load_costs(cost);
      const LpStatus s = iterate(false);
      sol.iterations = iterations_;
      if (s == LpStatus::IterationLimit) {
        sol.status = s;
        return sol;
      }
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= first_artificial_) infeas += beta_[i];
      }
      if (infeas > 1e-7 * (1.0 + max_rhs())) {
        sol.status = LpStatus::Infeasible;
        return sol;
      }
      // Artificials are held at zero for the rest of the solve.
      for (std::size_t j = first_artificial_; j < cols_; ++j) upper_[j] = 0.0;
    }

    std::vector<double> cost(cols_, 0.0);
    for (const auto& t : prog_.objective) cost[static_cast<std::size_t>(t.var)] += t.coef;
    load_costs(cost);
    const LpStatus s = iterate(true);
    sol.iterations = iterations_;
    sol.status = s;
    if (s != LpStatus::Optimal) return sol;

    std::vector<double> shifted(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) {
      if (!is_basic_[j] && at_upper_[j]) shifted[j] = upper_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) shifted[basis_[i]] = beta_[i];
    sol.values.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      double x = prog_.lower[j] + shifted[j];
      // Snap round-off back inside the box.
      x = std::max(x, prog_.lower[j]);
      if (std::isfinite(prog_.upper[j])) x = std::min(x, prog_.upper[j]);
      sol.values[j] = x;
    }
    sol.objective_value = evaluate_objective(prog_, sol.values);
    return sol;
  }

 private:
  double max_rhs() const {
    double b = 0.0;
    for (double x : beta_) b = std::max(b, std::abs(x));
    return b;
  }

  double* cost_row() { return &tab_[m_ * cols_]; }

  // Reduced costs d_j = c_j - c_B^T (B^-1 A)_j, with nonbasic-at-upper
  // values folded into the basic values already.
  void load_costs(const std::vector<double>& cost) {
    double* d = cost_row();
    std::copy(cost.begin(), cost.end(), d);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tab_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) d[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i) d[basis_[i]] = 0.0;
  }

  LpStatus iterate(bool phase_two) {
    const double tol = opts_.optimality_tol;
    const double piv_tol = 1e-9;
    int degenerate_run = 0;
    bool bland = false;
    const std::size_t enter_limit = phase_two ? first_artificial_ : cols_;

    while (true) {
      if (iterations_ >= max_iter_) return LpStatus::IterationLimit;
      const double* d = cost_row();

      // Pricing.
      std::size_t enter = cols_;
      double best = 0.0;
      for (std::size_t j = 0; j < enter_limit; ++j) {
        if (is_basic_[j]) continue;
        double gain = 0.0;
        if (!at_upper_[j] && d[j] > tol && upper_[j] > 0.0) gain = d[j];
        if (at_upper_[j] && d[j] < -tol) gain = -d[j];
        if (gain <= 0.0) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (gain > best) {
          best = gain;
          enter = j;
        }
      }
      if (enter == cols_) return LpStatus::Optimal;
      const double dir = at_upper_[enter] ? -1.0 : 1.0;

      // Ratio test.
      double theta = upper_[enter];
      std::size_t leave = m_;
      double leave_alpha = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = tab_[i * cols_ + enter] * dir;
        double limit;
        if (a > piv_tol) {
          limit = std::max(beta_[i], 0.0) / a;
        } else if (a < -piv_tol && std::isfinite(upper_[basis_[i]])) {
          limit = std::max(upper_[basis_[i]] - beta_[i], 0.0) / -a;
        } else {
          continue;
        }
        const bool better = limit < theta - 1e-12 ||
                            (limit <= theta + 1e-12 && leave != m_ &&
                             (bland ? basis_[i] < basis_[leave] : std::abs(a) > std::abs(leave_alpha)));
        if (better || (leave == m_ && limit <= theta)) {
          theta = limit;
          leave = i;
          leave_alpha = a;
        }
      }
      if (!std::isfinite(theta)) return LpStatus::Unbounded;

      ++iterations_;
      if (theta <= 1e-12) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      for (std::size_t i = 0; i < m_; ++i) {
        beta_[i] -= tab_[i * cols_ + enter] * dir * theta;
      }

      if (leave == m_) {
        // Bound flip: the entering variable crosses to its other bound.
        at_upper_[enter] = !at_upper_[enter];
        continue;
      }

      const std::size_t out = basis_[leave];
      const double entering_value = dir > 0 ? theta : upper_[enter] - theta;
      is_basic_[out] = false;
      at_upper_[out] = leave_alpha < 0.0;
      is_basic_[enter] = true;
      at_upper_[enter] = false;
      basis_[leave] = enter;
      beta_[leave] = entering_value;
      pivot_tableau(tab_, m_ + 1, cols_, leave, enter, opts_.execution);
    }
  }

  const LpProgram& prog_;
  SolverOptions opts_;
  std::size_t n_ = 0, m_ = 0, cols_ = 0;
  std::size_t first_slack_ = 0, first_artificial_ = 0;
  std::vector<double> tab_;
  std::vector<double> upper_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
  std::vector<std::size_t> basis_;
  std::vector<double> beta_;
  int iterations_ = 0;
  int max_iter_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProgram& prog, SolverOptions opts) {
  const auto problems = check_program(prog);
  if (!problems.empty()) {
    std::string msg = "ill-formed LP:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
  BoundedSimplex simplex(prog, opts);
  return simplex.run();
}

}  // namespace fairmatch
