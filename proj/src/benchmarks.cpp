#include "fairmatch/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <stdexcept>

namespace fairmatch {

const char* to_string(Objective o) {
  switch (o) {
    case Objective::Operator: return "profit";
    case Objective::OfflineFair: return "offline_fairness";
    case Objective::OnlineFair: return "online_fairness";
  }
  return "unknown";
}

namespace {

std::string var_name(int e, int t, bool kad) {
  return kad ? "x[" + std::to_string(e) + "," + std::to_string(t) + "]" : "x[" + std::to_string(e) + "]";
}

// Coefficient of edge e's utility term for the objective: w p_e for KIID,
// w for KAD (where x already counts successful matches).
double utility(const Edge& e, Objective obj) {
  switch (obj) {
    case Objective::Operator: return e.w_op;
    case Objective::OfflineFair: return e.w_off;
    case Objective::OnlineFair: return e.w_on;
  }
  return 0.0;
}

std::vector<double> offline_group_sizes(const Instance& inst);
std::vector<double> online_group_mass(const Instance& inst);

// Adds eta and one row per non-degenerate group:
//   eta - sum_e coef_e x_e / size_g <= 0.
// Groups that only label the other side are skipped silently.
void add_max_min_rows(BenchmarkLp& lp, const Instance& inst, Side side,
                      const std::vector<std::vector<Term>>& group_terms, const std::vector<double>& group_size) {
  lp.eta = lp.program.add_variable("eta", 0.0, kInf, 1.0);
  const std::vector<double> other = side == Side::Offline ? online_group_mass(inst) : offline_group_sizes(inst);
  int rows = 0;
  for (std::size_t g = 0; g < group_terms.size(); ++g) {
    const std::string& name = inst.groups[g];
    if (group_size[g] <= 0.0) {
      if (other[g] > 0.0) continue;
      lp.program.warnings.push_back(std::string(side == Side::Offline ? "offline" : "online") + " group '" + name +
                                    "' has no members and is dropped from the max-min");
      continue;
    }
    std::vector<Term> row;
    row.reserve(group_terms[g].size() + 1);
    row.push_back({lp.eta, 1.0});
    for (const auto& t : group_terms[g]) row.push_back({t.var, -t.coef / group_size[g]});
    lp.program.add_constraint(std::move(row), Relation::LessEqual, 0.0, "eta<=" + name);
    ++rows;
  }
  if (rows == 0) {
    lp.program.warnings.emplace_back("no non-degenerate group; max-min value fixed at 0");
    lp.program.add_constraint({{lp.eta, 1.0}}, Relation::LessEqual, 0.0, "eta<=0");
  }
}

std::vector<double> offline_group_sizes(const Instance& inst) {
  std::vector<double> size(inst.groups.size(), 0.0);
  for (const auto& u : inst.offline) size[static_cast<std::size_t>(u.group)] += 1.0;
  return size;
}

std::vector<double> online_group_mass(const Instance& inst) {
  std::vector<double> mass(inst.groups.size(), 0.0);
  for (int v = 0; v < static_cast<int>(inst.online.size()); ++v) {
    mass[static_cast<std::size_t>(inst.online[static_cast<std::size_t>(v)].group)] += expected_arrivals(inst, v);
  }
  return mass;
}

// Objective rows shared by the KIID and KAD builders. `terms_of_edge(e)`
// lists (var, multiplier) pairs whose weighted sum is edge e's expected
// success count.
template <typename TermsOfEdge>
void add_objective(BenchmarkLp& lp, const Instance& inst, Objective obj, TermsOfEdge terms_of_edge) {
  if (obj == Objective::Operator) {
    for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e) {
      const double w = utility(inst.edges[static_cast<std::size_t>(e)], obj);
      for (const auto& t : terms_of_edge(e)) {
        if (w * t.coef != 0.0) lp.program.objective.push_back({t.var, w * t.coef});
      }
    }
    return;
  }
  const Side side = obj == Objective::OfflineFair ? Side::Offline : Side::Online;
  std::vector<std::vector<Term>> group_terms(inst.groups.size());
  for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e) {
    const Edge& edge = inst.edges[static_cast<std::size_t>(e)];
    const double w = utility(edge, obj);
    const auto g = static_cast<std::size_t>(side == Side::Offline ? inst.offline[static_cast<std::size_t>(edge.u)].group
                                                                  : inst.online[static_cast<std::size_t>(edge.v)].group);
    for (const auto& t : terms_of_edge(e)) {
      if (w * t.coef != 0.0) group_terms[g].push_back({t.var, w * t.coef});
    }
  }
  add_max_min_rows(lp, inst, side, group_terms,
                   side == Side::Offline ? offline_group_sizes(inst) : online_group_mass(inst));
}

void require_unit_success(const Instance& inst, const char* who) {
  for (const auto& e : inst.edges) {
    if (e.success_prob != 1.0) {
      throw std::invalid_argument(std::string(who) + ": KAD benchmarks require p_e = 1 on every edge");
    }
  }
}

// Variables and constraints of the KAD polytope.
BenchmarkLp kad_polytope(const Instance& inst, const char* who) {
  require_valid(inst);
  require_unit_success(inst, who);
  const Instance kad = as_kad(inst);
  const Adjacency adj(kad);
  BenchmarkLp lp;
  lp.rounds = kad.horizon;
  const auto rounds = static_cast<std::size_t>(lp.rounds);
  lp.edge_var.assign(kad.edges.size() * rounds, -1);
  for (int e = 0; e < static_cast<int>(kad.edges.size()); ++e) {
    const int v = kad.edges[static_cast<std::size_t>(e)].v;
    for (int t = 0; t < kad.horizon; ++t) {
      if (kad.arrival_prob(v, t) <= 0.0) continue;
      lp.edge_var[static_cast<std::size_t>(e) * rounds + static_cast<std::size_t>(t)] =
          lp.program.add_variable(var_name(e, t, true), 0.0, 1.0);
    }
  }
  for (std::size_t u = 0; u < kad.offline.size(); ++u) {
    std::vector<Term> row;
    for (int e : adj.by_offline[u]) {
      for (std::size_t t = 0; t < rounds; ++t) {
        const int x = lp.edge_var[static_cast<std::size_t>(e) * rounds + t];
        if (x >= 0) row.push_back({x, 1.0});
      }
    }
    if (!row.empty()) lp.program.add_constraint(std::move(row), Relation::LessEqual, 1.0, "match[u" + std::to_string(u) + "]");
  }
  for (std::size_t v = 0; v < kad.online.size(); ++v) {
    for (int t = 0; t < kad.horizon; ++t) {
      std::vector<Term> row;
      for (int e : adj.by_online[v]) {
        const int x = lp.edge_var[static_cast<std::size_t>(e) * rounds + static_cast<std::size_t>(t)];
        if (x >= 0) row.push_back({x, 1.0});
      }
      if (!row.empty()) {
        lp.program.add_constraint(std::move(row), Relation::LessEqual, kad.arrival_prob(static_cast<int>(v), t),
                                  "arrive[v" + std::to_string(v) + ",t" + std::to_string(t) + "]");
      }
    }
  }
  return lp;
}

std::vector<Term> kad_terms(const BenchmarkLp& lp, int e) {
  std::vector<Term> out;
  const auto rounds = static_cast<std::size_t>(lp.rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    const int x = lp.edge_var[static_cast<std::size_t>(e) * rounds + t];
    if (x >= 0) out.push_back({x, 1.0});
  }
  return out;
}

}  // namespace

BenchmarkLp build_kiid_lp(const Instance& inst, Objective obj, KiidForm form) {
  if (inst.arrival_model != ArrivalModel::Kiid) throw std::invalid_argument("build_kiid_lp: KIID instance required");
  require_valid(inst);
  if (form == KiidForm::Fragmented && !is_fragmented(inst)) {
    throw std::invalid_argument("build_kiid_lp: instance is not fragmented (every n_v must be 1)");
  }
  const Adjacency adj(inst);
  std::vector<double> n(inst.online.size());
  for (int v = 0; v < static_cast<int>(inst.online.size()); ++v) {
    n[static_cast<std::size_t>(v)] = form == KiidForm::Fragmented ? 1.0 : expected_arrivals(inst, v);
  }

  BenchmarkLp lp;
  lp.rounds = 1;
  for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e) {
    const double cap = n[static_cast<std::size_t>(inst.edges[static_cast<std::size_t>(e)].v)];
    lp.edge_var.push_back(lp.program.add_variable(var_name(e, 0, false), 0.0, cap));
  }
  auto x = [&](int e) { return lp.edge_var[static_cast<std::size_t>(e)]; };
  auto p = [&](int e) { return inst.edges[static_cast<std::size_t>(e)].success_prob; };

  for (std::size_t u = 0; u < inst.offline.size(); ++u) {
    if (adj.by_offline[u].empty()) continue;
    std::vector<Term> cap, probes;
    for (int e : adj.by_offline[u]) {
      cap.push_back({x(e), p(e)});
      probes.push_back({x(e), 1.0});
    }
    const std::string id = std::to_string(u);
    lp.program.add_constraint(std::move(cap), Relation::LessEqual, 1.0, "capacity[u" + id + "]");
    lp.program.add_constraint(std::move(probes), Relation::LessEqual, inst.offline[u].patience, "patience[u" + id + "]");
  }
  for (std::size_t v = 0; v < inst.online.size(); ++v) {
    if (adj.by_online[v].empty()) continue;
    std::vector<Term> rate, probes;
    for (int e : adj.by_online[v]) {
      rate.push_back({x(e), p(e)});
      probes.push_back({x(e), 1.0});
    }
    const std::string id = std::to_string(v);
    lp.program.add_constraint(std::move(rate), Relation::LessEqual, n[v], "arrival[v" + id + "]");
    lp.program.add_constraint(std::move(probes), Relation::LessEqual, inst.online[v].patience * n[v],
                              "patience[v" + id + "]");
  }
  add_objective(lp, inst, obj, [&](int e) { return std::vector<Term>{{x(e), p(e)}}; });
  return lp;
}

BenchmarkLp build_kad_lp(const Instance& inst, Objective obj) {
  if (inst.arrival_model != ArrivalModel::Kad) throw std::invalid_argument("build_kad_lp: KAD instance required");
  BenchmarkLp lp = kad_polytope(inst, "build_kad_lp");
  add_objective(lp, inst, obj, [&](int e) { return kad_terms(lp, e); });
  return lp;
}

BenchmarkLp build_individual_lp(const Instance& inst, Side side) {
  BenchmarkLp lp = kad_polytope(inst, "build_individual_lp");
  const auto rounds = static_cast<std::size_t>(lp.rounds);
  if (side == Side::Offline) {
    std::vector<std::vector<Term>> terms(inst.offline.size());
    for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e) {
      const Edge& edge = inst.edges[static_cast<std::size_t>(e)];
      for (const auto& t : kad_terms(lp, e)) {
        if (edge.w_off != 0.0) terms[static_cast<std::size_t>(edge.u)].push_back({t.var, edge.w_off});
      }
    }
    lp.eta = lp.program.add_variable("eta", 0.0, kInf, 1.0);
    for (std::size_t u = 0; u < terms.size(); ++u) {
      std::vector<Term> row{{lp.eta, 1.0}};
      for (const auto& t : terms[u]) row.push_back({t.var, -t.coef});
      lp.program.add_constraint(std::move(row), Relation::LessEqual, 0.0, "eta<=u" + std::to_string(u));
    }
    if (terms.empty()) lp.program.add_constraint({{lp.eta, 1.0}}, Relation::LessEqual, 0.0, "eta<=0");
  } else {
    lp.eta = lp.program.add_variable("eta", 0.0, kInf, 1.0);
    for (std::size_t t = 0; t < rounds; ++t) {
      std::vector<Term> row{{lp.eta, 1.0}};
      for (std::size_t e = 0; e < inst.edges.size(); ++e) {
        const int x = lp.edge_var[e * rounds + t];
        if (x >= 0 && inst.edges[e].w_on != 0.0) row.push_back({x, -inst.edges[e].w_on});
      }
      lp.program.add_constraint(std::move(row), Relation::LessEqual, 0.0, "eta<=t" + std::to_string(t));
    }
  }
  return lp;
}

BenchmarkSolution solve_benchmark(const BenchmarkLp& lp, SolverOptions opts) {
  BenchmarkSolution sol;
  sol.lp = solve_lp(lp.program, opts);
  if (!sol.lp.optimal()) {
    throw std::runtime_error(std::string("benchmark LP not solved to optimality: ") + to_string(sol.lp.status));
  }
  sol.rounds = lp.rounds;
  sol.edge_values.assign(lp.edge_var.size(), 0.0);
  for (std::size_t k = 0; k < lp.edge_var.size(); ++k) {
    if (lp.edge_var[k] >= 0) sol.edge_values[k] = sol.lp.values[static_cast<std::size_t>(lp.edge_var[k])];
  }
  return sol;
}

const BenchmarkSolution& BenchmarkBundle::solution(Objective o) const {
  switch (o) {
    case Objective::Operator: return x_star;
    case Objective::OfflineFair: return y_star;
    case Objective::OnlineFair: return z_star;
  }
  return x_star;
}

double BenchmarkBundle::opt(Objective o) const {
  switch (o) {
    case Objective::Operator: return opt_op;
    case Objective::OfflineFair: return opt_off;
    case Objective::OnlineFair: return opt_on;
  }
  return 0.0;
}

namespace {

BenchmarkBundle solve_bundle(ArrivalModel model, std::array<BenchmarkLp, 3>& lps, Execution exec) {
  std::array<BenchmarkSolution, 3> sols;
  std::array<std::exception_ptr, 3> errors;
  SolverOptions opts;
  opts.execution = Execution::Serial;
#pragma omp parallel for schedule(static, 1) if (exec == Execution::Parallel)
  for (int k = 0; k < 3; ++k) {
    try {
      sols[static_cast<std::size_t>(k)] = solve_benchmark(lps[static_cast<std::size_t>(k)], opts);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  BenchmarkBundle bundle;
  bundle.model = model;
  bundle.x_star = std::move(sols[0]);
  bundle.y_star = std::move(sols[1]);
  bundle.z_star = std::move(sols[2]);
  bundle.opt_op = bundle.x_star.lp.objective_value;
  bundle.opt_off = bundle.y_star.lp.objective_value;
  bundle.opt_on = bundle.z_star.lp.objective_value;
  for (const auto& lp : lps) {
    bundle.warnings.insert(bundle.warnings.end(), lp.program.warnings.begin(), lp.program.warnings.end());
  }
  return bundle;
}

constexpr std::array kObjectives{Objective::Operator, Objective::OfflineFair, Objective::OnlineFair};

}  // namespace

BenchmarkBundle benchmarks(const Instance& inst, Execution exec) {
  std::array<BenchmarkLp, 3> lps;
  for (std::size_t k = 0; k < 3; ++k) {
    lps[k] = inst.arrival_model == ArrivalModel::Kiid ? build_kiid_lp(inst, kObjectives[k], KiidForm::Aggregated)
                                                      : build_kad_lp(inst, kObjectives[k]);
  }
  return solve_bundle(inst.arrival_model, lps, exec);
}

BenchmarkBundle fragmented_benchmarks(const Instance& inst, const Instance& fragmented, Execution exec) {
  if (inst.arrival_model != ArrivalModel::Kiid || fragmented.arrival_model != ArrivalModel::Kiid) {
    throw std::invalid_argument("fragmented_benchmarks: KIID instances required");
  }
  std::array<BenchmarkLp, 3> lps;
  for (std::size_t k = 0; k < 3; ++k) lps[k] = build_kiid_lp(inst, kObjectives[k], KiidForm::Aggregated);
  BenchmarkBundle agg = solve_bundle(inst.arrival_model, lps, exec);

  std::map<std::pair<int, int>, int> edge_of;
  for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e) {
    edge_of[{inst.edges[static_cast<std::size_t>(e)].u, inst.edges[static_cast<std::size_t>(e)].v}] = e;
  }
  std::vector<int> source(fragmented.edges.size());
  for (std::size_t e = 0; e < fragmented.edges.size(); ++e) {
    const Edge& edge = fragmented.edges[e];
    const int origin = fragmented.online[static_cast<std::size_t>(edge.v)].origin;
    const auto it = edge_of.find({edge.u, origin});
    if (origin < 0 || it == edge_of.end()) {
      throw std::invalid_argument("fragmented_benchmarks: edge " + std::to_string(e) + " has no source edge");
    }
    source[e] = it->second;
  }
  for (auto* sol : {&agg.x_star, &agg.y_star, &agg.z_star}) {
    std::vector<double> spread(fragmented.edges.size());
    for (std::size_t e = 0; e < spread.size(); ++e) {
      const int src = source[e];
      const double n = expected_arrivals(inst, inst.edges[static_cast<std::size_t>(src)].v);
      spread[e] = sol->edge_values[static_cast<std::size_t>(src)] / n;
    }
    sol->edge_values = std::move(spread);
  }
  return agg;
}

IndividualOptima individual_optima(const Instance& inst) {
  IndividualOptima out;
  out.offline = solve_benchmark(build_individual_lp(inst, Side::Offline)).lp.objective_value;
  out.online = solve_benchmark(build_individual_lp(inst, Side::Online)).lp.objective_value;
  return out;
}

double min_group_average(const Instance& inst, const BenchmarkLp& lp, const BenchmarkSolution& sol, Side side) {
  const bool kad = lp.rounds > 1 || inst.arrival_model == ArrivalModel::Kad;
  const std::vector<double> size = side == Side::Offline ? offline_group_sizes(inst) : online_group_mass(inst);
  std::vector<double> total(inst.groups.size(), 0.0);
  for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e) {
    const Edge& edge = inst.edges[static_cast<std::size_t>(e)];
    const double w = side == Side::Offline ? edge.w_off : edge.w_on;
    const auto g = static_cast<std::size_t>(side == Side::Offline ? inst.offline[static_cast<std::size_t>(edge.u)].group
                                                                  : inst.online[static_cast<std::size_t>(edge.v)].group);
    double successes = 0.0;
    for (int t = 0; t < lp.rounds; ++t) successes += sol.value(e, t);
    if (!kad) successes *= edge.success_prob;
    total[g] += w * successes;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < total.size(); ++g) {
    if (size[g] > 0.0) best = std::min(best, total[g] / size[g]);
  }
  return std::isfinite(best) ? best : 0.0;
}

}  // namespace fairmatch
