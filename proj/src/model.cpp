#include "fairmatch/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

namespace fairmatch {

double Instance::arrival_prob(int v, int t) const {
  const auto& type = online.at(static_cast<std::size_t>(v));
  if (arrival_model == ArrivalModel::Kiid) return type.p;
  return type.p_t.at(static_cast<std::size_t>(t));
}

Adjacency::Adjacency(const Instance& inst)
    : by_offline(inst.offline.size()), by_online(inst.online.size()) {
  for (int e = 0; e < static_cast<int>(inst.edges.size()); ++e) {
    const Edge& edge = inst.edges[static_cast<std::size_t>(e)];
    by_offline.at(static_cast<std::size_t>(edge.u)).push_back(e);
    by_online.at(static_cast<std::size_t>(edge.v)).push_back(e);
  }
}

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

std::string at(const char* list, std::size_t i) {
  return std::string(list) + "[" + std::to_string(i) + "]";
}

}  // namespace

std::vector<Violation> validate_instance(const Instance& inst, ValidationOptions opts) {
  std::vector<Violation> out;
  auto flag = [&](std::string field, std::string rule) {
    out.push_back({std::move(field), std::move(rule)});
  };
  const int ngroups = static_cast<int>(inst.groups.size());
  const bool kad = inst.arrival_model == ArrivalModel::Kad;

  if (inst.horizon < 1) flag("horizon", "horizon must be at least 1");

  for (std::size_t i = 0; i < inst.offline.size(); ++i) {
    const auto& u = inst.offline[i];
    if (u.id != static_cast<int>(i)) flag(at("offline", i) + ".id", "ids must be 0..|U|-1 in order");
    if (u.patience < 1) flag(at("offline", i) + ".patience", "patience must be >= 1");
    if (u.group < 0 || u.group >= ngroups) flag(at("offline", i) + ".group", "unknown group");
  }
  for (std::size_t i = 0; i < inst.online.size(); ++i) {
    const auto& v = inst.online[i];
    if (v.id != static_cast<int>(i)) flag(at("online", i) + ".id", "ids must be 0..|V|-1 in order");
    if (v.patience < 1) flag(at("online", i) + ".patience", "patience must be >= 1");
    if (v.group < 0 || v.group >= ngroups) flag(at("online", i) + ".group", "unknown group");
    if (kad) {
      if (static_cast<int>(v.p_t.size()) != inst.horizon) {
        flag(at("online", i) + ".p_t", "length must equal horizon");
      } else if (!std::all_of(v.p_t.begin(), v.p_t.end(), in_unit_interval)) {
        flag(at("online", i) + ".p_t", "arrival probabilities must lie in [0,1]");
      }
    } else if (!in_unit_interval(v.p)) {
      flag(at("online", i) + ".p", "arrival probability must lie in [0,1]");
    }
  }

  // Arrival mass per round.
  if (inst.horizon >= 1 && !inst.online.empty()) {
    const int rounds = kad ? inst.horizon : 1;
    for (int t = 0; t < rounds; ++t) {
      double mass = 0.0;
      bool complete = true;
      for (const auto& v : inst.online) {
        if (kad && static_cast<int>(v.p_t.size()) != inst.horizon) {
          complete = false;
          break;
        }
        mass += kad ? v.p_t[static_cast<std::size_t>(t)] : v.p;
      }
      if (complete && std::abs(mass - 1.0) > kArrivalMassTolerance) {
        flag(kad ? "online.p_t[" + std::to_string(t) + "]" : std::string("online.p"),
             "arrival mass " + std::to_string(mass) + " must equal 1");
      }
    }
  } else if (inst.online.empty()) {
    flag("online", "at least one online type is required");
  }

  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < inst.edges.size(); ++i) {
    const auto& e = inst.edges[i];
    const bool u_ok = e.u >= 0 && e.u < static_cast<int>(inst.offline.size());
    const bool v_ok = e.v >= 0 && e.v < static_cast<int>(inst.online.size());
    if (!u_ok) flag(at("edges", i) + ".u", "unknown offline vertex");
    if (!v_ok) flag(at("edges", i) + ".v", "unknown online type");
    if (!in_unit_interval(e.success_prob)) flag(at("edges", i) + ".p_e", "success probability must lie in [0,1]");
    if (e.w_op < 0 || e.w_off < 0 || e.w_on < 0) flag(at("edges", i) + ".w", "utilities must be nonnegative");
    if (u_ok && v_ok && !seen.emplace(e.u, e.v).second) flag(at("edges", i), "duplicate (u,v) edge");
    if (kad && opts.require_unit_success_for_kad && e.success_prob != 1.0) {
      flag(at("edges", i) + ".p_e", "KAD instances require p_e = 1");
    }
  }
  return out;
}

void require_valid(const Instance& inst, ValidationOptions opts) {
  const auto violations = validate_instance(inst, opts);
  if (violations.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.rule;
  throw std::invalid_argument(msg);
}

double expected_arrivals(const Instance& inst, int v) {
  if (v < 0 || v >= static_cast<int>(inst.online.size())) {
    throw std::out_of_range("unknown online type " + std::to_string(v));
  }
  const auto& type = inst.online[static_cast<std::size_t>(v)];
  if (inst.arrival_model == ArrivalModel::Kiid) return inst.horizon * type.p;
  double n = 0.0;
  for (double p : type.p_t) n += p;
  return n;
}

bool is_fragmented(const Instance& inst, double tol) {
  if (inst.arrival_model != ArrivalModel::Kiid) return false;
  for (int v = 0; v < static_cast<int>(inst.online.size()); ++v) {
    if (std::abs(expected_arrivals(inst, v) - 1.0) > tol) return false;
  }
  return true;
}

Instance fragment_types(const Instance& inst) {
  if (inst.arrival_model != ArrivalModel::Kiid) {
    throw std::invalid_argument("fragment_types: KIID instance required");
  }
  if (is_fragmented(inst)) {
    Instance out = inst;
    for (int v = 0; v < static_cast<int>(out.online.size()); ++v) out.online[static_cast<std::size_t>(v)].origin = v;
    return out;
  }
  Adjacency adj(inst);
  Instance out = inst;
  out.online.clear();
  out.edges.clear();
  const double unit = 1.0 / inst.horizon;
  for (int v = 0; v < static_cast<int>(inst.online.size()); ++v) {
    const double n = expected_arrivals(inst, v);
    const double k = std::round(n);
    if (std::abs(n - k) > 1e-9 * std::max(1.0, n)) {
      throw std::invalid_argument("fragment_types: type " + std::to_string(v) +
                                  " has non-integral expected arrivals " + std::to_string(n));
    }
    for (int copy = 0; copy < static_cast<int>(k); ++copy) {
      OnlineType t = inst.online[static_cast<std::size_t>(v)];
      t.id = static_cast<int>(out.online.size());
      t.p = unit;
      t.origin = v;
      out.online.push_back(t);
      for (int e : adj.by_online[static_cast<std::size_t>(v)]) {
        Edge edge = inst.edges[static_cast<std::size_t>(e)];
        edge.v = t.id;
        out.edges.push_back(edge);
      }
    }
  }
  return out;
}

Instance as_kad(const Instance& inst) {
  if (inst.arrival_model == ArrivalModel::Kad) return inst;
  Instance out = inst;
  out.arrival_model = ArrivalModel::Kad;
  for (auto& v : out.online) {
    v.p_t.assign(static_cast<std::size_t>(inst.horizon), v.p);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> check_trace(const Instance& inst, const RunTrace& trace) {
  std::vector<std::string> out;
  const std::size_t nu = inst.offline.size();
  std::vector<int> failed(nu, 0);
  std::vector<bool> matched(nu, false);
  std::vector<double> off(nu, 0.0);
  std::vector<double> on(static_cast<std::size_t>(inst.horizon), 0.0);
  double op = 0.0;

  for (const auto& ev : trace.events) {
    const std::string where = "round " + std::to_string(ev.round);
    if (ev.round < 0 || ev.round >= inst.horizon) {
      out.push_back(where + ": round outside horizon");
      continue;
    }
    const auto& type = inst.online.at(static_cast<std::size_t>(ev.type));
    int successes = 0;
    for (const auto& probe : ev.probes) {
      const Edge& e = inst.edges.at(static_cast<std::size_t>(probe.edge));
      const auto u = static_cast<std::size_t>(e.u);
      if (e.v != ev.type) out.push_back(where + ": probe on an edge of another type");
      if (successes > 0) out.push_back(where + ": probe after a success");
      if (matched[u]) out.push_back(where + ": probe to matched vertex " + std::to_string(e.u));
      if (failed[u] >= inst.offline[u].patience) {
        out.push_back(where + ": probe to vertex " + std::to_string(e.u) + " out of patience");
      }
      if (probe.success) {
        ++successes;
        matched[u] = true;
        op += e.w_op;
        off[u] += e.w_off;
        on[static_cast<std::size_t>(ev.round)] += e.w_on;
      } else {
        ++failed[u];
      }
    }
    if (successes > 1) out.push_back(where + ": more than one success");
    if (static_cast<int>(ev.probes.size()) > type.patience) {
      out.push_back(where + ": more probes than online patience");
    }
  }

  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  if (!close(trace.op_utility, op)) out.push_back("operator utility does not match events");
  if (trace.off_utility.size() != nu) {
    out.push_back("offline utility vector has wrong size");
  } else {
    for (std::size_t u = 0; u < nu; ++u) {
      if (!close(trace.off_utility[u], off[u])) out.push_back("offline utility mismatch at " + std::to_string(u));
    }
  }
  if (trace.on_utility.size() != on.size()) {
    out.push_back("online utility vector has wrong size");
  } else {
    for (std::size_t t = 0; t < on.size(); ++t) {
      if (!close(trace.on_utility[t], on[t])) out.push_back("online utility mismatch at round " + std::to_string(t));
    }
  }
  return out;
}

std::vector<int> departure_rounds(const Instance& inst, const RunTrace& trace) {
  const std::size_t nu = inst.offline.size();
  std::vector<int> depart(nu, inst.horizon);
  std::vector<int> failed(nu, 0);
  for (const auto& ev : trace.events) {
    for (const auto& probe : ev.probes) {
      const auto u = static_cast<std::size_t>(inst.edges[static_cast<std::size_t>(probe.edge)].u);
      if (depart[u] != inst.horizon) continue;
      if (!probe.success) ++failed[u];
      if (probe.success || failed[u] >= inst.offline[u].patience) {
        depart[u] = std::min(inst.horizon, ev.round + 1);
      }
    }
  }
  return depart;
}

// ---------------------------------------------------------------------------

Estimate mean_estimate(std::span<const double> samples) {
  Estimate est;
  const auto n = static_cast<double>(samples.size());
  if (samples.empty()) return est;
  double sum = 0.0;
  for (double x : samples) sum += x;
  est.mean = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - est.mean) * (x - est.mean);
    est.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return est;
}

namespace {

// Minimum over components of per-component sample means; the reported
// standard error is that of the minimizing component.
Estimate min_of_means(const std::vector<std::vector<double>>& per_component) {
  Estimate best;
  best.mean = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < per_component.size(); ++k) {
    if (per_component[k].empty()) continue;
    Estimate est = mean_estimate(per_component[k]);
    if (est.mean < best.mean) {
      best = est;
      best.argmin = static_cast<int>(k);
    }
  }
  if (best.argmin < 0) best.mean = 0.0;
  return best;
}

}  // namespace

ObjectiveEstimate evaluate_objectives(const Instance& inst, std::span<const RunTrace> traces) {
  if (traces.empty()) throw std::invalid_argument("evaluate_objectives: no traces");
  const std::size_t n = traces.size();
  const std::size_t ng = inst.groups.size();
  const std::size_t nu = inst.offline.size();
  const auto horizon = static_cast<std::size_t>(inst.horizon);

  std::vector<double> off_size(ng, 0.0);
  std::vector<double> on_mass(ng, 0.0);
  for (const auto& u : inst.offline) off_size[static_cast<std::size_t>(u.group)] += 1.0;
  for (int v = 0; v < static_cast<int>(inst.online.size()); ++v) {
    on_mass[static_cast<std::size_t>(inst.online[static_cast<std::size_t>(v)].group)] +=
        expected_arrivals(inst, v);
  }

  std::vector<double> profit(n);
  // Empty inner vectors mark groups skipped on that side.
  std::vector<std::vector<double>> off_group(ng), on_group(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    if (off_size[g] > 0) off_group[g].resize(n, 0.0);
    if (on_mass[g] > 0) on_group[g].resize(n, 0.0);
  }
  std::vector<std::vector<double>> off_indiv(nu, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> on_indiv(horizon, std::vector<double>(n, 0.0));

  for (std::size_t i = 0; i < n; ++i) {
    const RunTrace& tr = traces[i];
    profit[i] = tr.op_utility;
    for (std::size_t u = 0; u < nu; ++u) {
      const double util = tr.off_utility.at(u);
      off_indiv[u][i] = util;
      const auto g = static_cast<std::size_t>(inst.offline[u].group);
      if (!off_group[g].empty()) off_group[g][i] += util / off_size[g];
    }
    for (std::size_t t = 0; t < horizon; ++t) on_indiv[t][i] = tr.on_utility.at(t);
    for (const auto& ev : tr.events) {
      const auto g = static_cast<std::size_t>(inst.online.at(static_cast<std::size_t>(ev.type)).group);
      if (!on_group[g].empty()) {
        on_group[g][i] += tr.on_utility.at(static_cast<std::size_t>(ev.round)) / on_mass[g];
      }
    }
  }

  ObjectiveEstimate out;
  out.profit = mean_estimate(profit);
  out.offline_group = min_of_means(off_group);
  out.online_group = min_of_means(on_group);
  out.offline_individual = min_of_means(off_indiv);
  out.online_individual = min_of_means(on_indiv);
  return out;
}

}  // namespace fairmatch
