#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fairmatch/model.hpp"
#include "fairmatch/random.hpp"

namespace testing {

/// One offline vertex, one online type, one edge; KIID with T = 1.
inline fairmatch::Instance single_edge(double p_e = 1.0, double w_op = 1.0, double w_off = 1.0, double w_on = 1.0) {
  fairmatch::Instance inst;
  inst.groups = {"g"};
  inst.offline = {{0, 0, 1}};
  fairmatch::OnlineType v;
  v.p = 1.0;
  inst.online = {v};
  inst.edges = {{0, 0, p_e, w_op, w_off, w_on}};
  return inst;
}

/// Random KAD instance with p_e = 1 and unit patience.
inline fairmatch::Instance random_kad(std::uint64_t seed, int nu, int nv, int T, double density = 0.8) {
  fairmatch::Rng rng = fairmatch::make_rng(seed);
  fairmatch::Instance inst;
  inst.arrival_model = fairmatch::ArrivalModel::Kad;
  inst.horizon = T;
  for (int g = 0; g < 2; ++g) inst.groups.push_back("g" + std::to_string(g));
  for (int u = 0; u < nu; ++u) inst.offline.push_back({u, u % 2, 1});
  std::vector<std::vector<double>> p(static_cast<std::size_t>(T), std::vector<double>(static_cast<std::size_t>(nv)));
  for (auto& row : p) {
    double s = 0.0;
    for (auto& x : row) s += (x = 0.05 + fairmatch::uniform01(rng));
    for (auto& x : row) x /= s;
  }
  for (int v = 0; v < nv; ++v) {
    fairmatch::OnlineType t;
    t.id = v;
    t.group = v % 2;
    for (int r = 0; r < T; ++r) t.p_t.push_back(p[static_cast<std::size_t>(r)][static_cast<std::size_t>(v)]);
    inst.online.push_back(t);
  }
  for (int u = 0; u < nu; ++u) {
    for (int v = 0; v < nv; ++v) {
      if (fairmatch::uniform01(rng) > density && !(u == 0 && v == 0)) continue;
      inst.edges.push_back({u, v, 1.0, 0.1 + fairmatch::uniform01(rng), 0.1 + fairmatch::uniform01(rng),
                            0.1 + fairmatch::uniform01(rng)});
    }
  }
  return inst;
}

/// Random fragmented KIID instance (p_v = 1/T, T = number of types).
inline fairmatch::Instance random_kiid(std::uint64_t seed, int nu, int nv, bool unit_success, double density = 0.8) {
  fairmatch::Rng rng = fairmatch::make_rng(seed);
  fairmatch::Instance inst;
  inst.horizon = nv;
  inst.groups = {"a", "b"};
  for (int u = 0; u < nu; ++u) inst.offline.push_back({u, u % 2, 1 + static_cast<int>(fairmatch::uniform_index(rng, 2))});
  for (int v = 0; v < nv; ++v) {
    fairmatch::OnlineType t;
    t.id = v;
    t.group = v % 2;
    t.patience = 1 + static_cast<int>(fairmatch::uniform_index(rng, 2));
    t.p = 1.0 / nv;
    inst.online.push_back(t);
  }
  for (int u = 0; u < nu; ++u) {
    for (int v = 0; v < nv; ++v) {
      if (fairmatch::uniform01(rng) > density && !(u == 0 && v == 0)) continue;
      const double p = unit_success ? 1.0 : 0.2 + 0.8 * fairmatch::uniform01(rng);
      inst.edges.push_back({u, v, p, fairmatch::uniform01(rng), fairmatch::uniform01(rng), fairmatch::uniform01(rng)});
    }
  }
  return inst;
}

/// Binomial standard error of an empirical frequency.
inline double binomial_se(double p, double n) { return std::sqrt(std::max(p * (1.0 - p), 1e-12) / n); }

/// Bitwise equality of two traces.
inline bool same_trace(const fairmatch::RunTrace& a, const fairmatch::RunTrace& b) {
  if (a.events.size() != b.events.size() || a.op_utility != b.op_utility || a.off_utility != b.off_utility ||
      a.on_utility != b.on_utility || a.clamped_probes != b.clamped_probes) {
    return false;
  }
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const auto& x = a.events[i];
    const auto& y = b.events[i];
    if (x.round != y.round || x.type != y.type || x.probes.size() != y.probes.size()) return false;
    for (std::size_t k = 0; k < x.probes.size(); ++k) {
      if (x.probes[k].edge != y.probes[k].edge || x.probes[k].success != y.probes[k].success) return false;
    }
  }
  return true;
}

}  // namespace testing
