#include "fairmatch/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "fairmatch/episode.hpp"
#include "fairmatch/random.hpp"

namespace fairmatch {
namespace {

// Probes `order` (already sorted) until success or patience is exhausted.
void probe_in_order(Episode& episode, const std::vector<int>& order, int patience, Rng& rng) {
  int probes = 0;
  for (int e : order) {
    if (probes >= patience) return;
    if (!episode.edge_available(e)) continue;
    ++probes;
    if (episode.probe(e, rng)) return;
  }
}

template <class Key>
RunTrace static_priority(const Instance& inst, std::uint64_t seed, Key key) {
  const Adjacency adj(inst);
  const ArrivalSampler arrivals(inst);
  std::vector<std::vector<int>> order(inst.online.size());
  for (std::size_t v = 0; v < order.size(); ++v) {
    order[v] = adj.by_online[v];
    std::stable_sort(order[v].begin(), order[v].end(), [&](int a, int b) {
      const double ka = key(inst.edges[static_cast<std::size_t>(a)]);
      const double kb = key(inst.edges[static_cast<std::size_t>(b)]);
      return ka != kb ? ka > kb : a < b;
    });
  }
  Episode episode(inst);
  for (int t = 0; t < inst.horizon; ++t) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int v = arrivals.sample(t, rng);
    episode.begin_round(t, v);
    const auto uv = static_cast<std::size_t>(v);
    probe_in_order(episode, order[uv], inst.online[uv].patience, rng);
  }
  return std::move(episode).finish();
}

}  // namespace

RunTrace greedy_o(const Instance& inst, std::uint64_t seed) {
  return static_priority(inst, seed, [](const Edge& e) { return e.success_prob * e.w_op; });
}

RunTrace greedy_r(const Instance& inst, std::uint64_t seed) {
  return static_priority(inst, seed, [](const Edge& e) { return e.success_prob * e.w_on; });
}

RunTrace greedy_d(const Instance& inst, std::uint64_t seed) {
  const Adjacency adj(inst);
  const ArrivalSampler arrivals(inst);
  const std::size_t ng = inst.groups.size();
  std::vector<double> group_size(ng, 0.0);
  for (const auto& u : inst.offline) group_size[static_cast<std::size_t>(u.group)] += 1.0;
  std::vector<double> group_utility(ng, 0.0);

  // Neighbors of each type split by offline group, descending w^U.
  std::vector<std::vector<std::vector<int>>> by_group(inst.online.size(), std::vector<std::vector<int>>(ng));
  for (std::size_t v = 0; v < inst.online.size(); ++v) {
    for (int e : adj.by_online[v]) {
      const auto g = static_cast<std::size_t>(inst.offline[static_cast<std::size_t>(inst.edges[static_cast<std::size_t>(e)].u)].group);
      by_group[v][g].push_back(e);
    }
    for (auto& list : by_group[v]) {
      std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
        const double wa = inst.edges[static_cast<std::size_t>(a)].w_off;
        const double wb = inst.edges[static_cast<std::size_t>(b)].w_off;
        return wa != wb ? wa > wb : a < b;
      });
    }
  }

  std::vector<std::size_t> groups(ng);
  Episode episode(inst);
  for (int t = 0; t < inst.horizon; ++t) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int v = arrivals.sample(t, rng);
    episode.begin_round(t, v);
    const auto uv = static_cast<std::size_t>(v);

    std::iota(groups.begin(), groups.end(), std::size_t{0});
    auto average = [&](std::size_t g) { return group_utility[g] / group_size[g]; };
    std::stable_sort(groups.begin(), groups.end(), [&](std::size_t a, std::size_t b) {
      if (group_size[a] == 0.0 || group_size[b] == 0.0) return group_size[a] > group_size[b];
      return average(a) < average(b);
    });
    for (std::size_t g : groups) {
      if (group_size[g] == 0.0) break;
      const auto& list = by_group[uv][g];
      if (std::none_of(list.begin(), list.end(), [&](int e) { return episode.edge_available(e); })) continue;
      const std::size_t before = episode.trace().events.back().probes.size();
      probe_in_order(episode, list, inst.online[uv].patience, rng);
      const auto& probes = episode.trace().events.back().probes;
      for (std::size_t i = before; i < probes.size(); ++i) {
        if (probes[i].success) group_utility[g] += inst.edges[static_cast<std::size_t>(probes[i].edge)].w_off;
      }
      break;
    }
  }
  return std::move(episode).finish();
}

}  // namespace fairmatch
