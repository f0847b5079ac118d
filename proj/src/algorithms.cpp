#include "fairmatch/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fairmatch/kernels.hpp"
#include "fairmatch/rounding.hpp"

namespace fairmatch {

double Weights::of(Objective o) const {
  switch (o) {
    case Objective::Operator: return alpha;
    case Objective::OfflineFair: return beta;
    case Objective::OnlineFair: return gamma;
  }
  return 0.0;
}

void validate_weights(const Weights& w) {
  for (double x : {w.alpha, w.beta, w.gamma}) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("weights must lie in [0,1]");
  }
  if (w.sum() > 1.0 + 1e-12) {
    throw std::invalid_argument("weights must satisfy alpha + beta + gamma <= 1 (got " + std::to_string(w.sum()) + ")");
  }
}

std::optional<Objective> choose_objective(const Weights& w, Rng& rng) {
  const double r = uniform01(rng);
  if (r < w.alpha) return Objective::Operator;
  if (r < w.alpha + w.beta) return Objective::OfflineFair;
  if (r < w.alpha + w.beta + w.gamma) return Objective::OnlineFair;
  return std::nullopt;
}

std::optional<int> ppdr(std::span<const double> xv, std::span<const int> edges, Episode& episode, int patience,
                        Rng& rng) {
  if (xv.size() != edges.size()) throw std::invalid_argument("ppdr: LP vector and edge list differ in length");
  std::vector<double> x(xv.begin(), xv.end());
  double sum = 0.0;
  for (double& v : x) {
    v = std::clamp(v, 0.0, 1.0);
    sum += v;
  }
  if (sum > patience + 1e-7) {
    throw std::invalid_argument("ppdr: LP vector sums to " + std::to_string(sum) + ", above patience " +
                                std::to_string(patience));
  }
  const RoundedVector bits = dependent_round(x, rng);
  const std::vector<int> order = random_permutation(static_cast<int>(edges.size()), rng);
  int probes = 0;
  for (int i : order) {
    if (!bits.bits[static_cast<std::size_t>(i)]) continue;
    const int e = edges[static_cast<std::size_t>(i)];
    if (!episode.edge_available(e)) continue;
    if (probes >= patience) break;
    ++probes;
    if (episode.probe(e, rng)) return e;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

constexpr Objective kObjectives[3] = {Objective::Operator, Objective::OfflineFair, Objective::OnlineFair};

}  // namespace

TsfPolicy::TsfPolicy(const Instance& inst, const BenchmarkBundle& bundle, Weights w)
    : inst_(&inst), adj_(inst), arrivals_(inst), w_(w) {
  validate_weights(w);
  if (inst.arrival_model != ArrivalModel::Kiid || !is_fragmented(inst)) {
    throw std::invalid_argument("TSF requires a fragmented KIID instance");
  }
  if (bundle.model != ArrivalModel::Kiid || bundle.x_star.edge_values.size() != inst.edges.size()) {
    throw std::invalid_argument("TSF: benchmark bundle does not belong to this instance");
  }
  for (int k = 0; k < 3; ++k) {
    const BenchmarkSolution& sol = bundle.solution(kObjectives[k]);
    auto& per_type = xv_[k];
    per_type.resize(inst.online.size());
    for (std::size_t v = 0; v < inst.online.size(); ++v) {
      for (int e : adj_.by_online[v]) per_type[v].push_back(sol.value(e));
    }
  }
}

RunTrace TsfPolicy::run(std::uint64_t seed) const {
  Episode episode(*inst_);
  for (int t = 0; t < inst_->horizon; ++t) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int v = arrivals_.sample(t, rng);
    episode.begin_round(t, v);
    const auto chosen = choose_objective(w_, rng);
    if (!chosen) continue;
    const auto k = static_cast<std::size_t>(*chosen);
    const auto uv = static_cast<std::size_t>(v);
    ppdr(xv_[k][uv], adj_.by_online[uv], episode, inst_->online[uv].patience, rng);
  }
  return std::move(episode).finish();
}

RunTrace run_tsf(const Instance& inst, const BenchmarkBundle& bundle, Weights w, std::uint64_t seed) {
  return TsfPolicy(inst, bundle, w).run(seed);
}

// ---------------------------------------------------------------------------

RhoTable RhoTable::ones(const Instance& inst, Weights w, double lambda) {
  RhoTable rho;
  rho.rounds = inst.horizon;
  rho.weights = w;
  rho.lambda = lambda;
  rho.by_offline.assign(inst.offline.size() * static_cast<std::size_t>(inst.horizon), 1.0);
  for (const auto& e : inst.edges) rho.edge_offline.push_back(e.u);
  return rho;
}

TsfKadPolicy::TsfKadPolicy(const Instance& inst, const BenchmarkBundle& bundle, Weights w, double lambda)
    : inst_(&inst), adj_(inst), arrivals_(inst), w_(w), lambda_(lambda), bundle_(&bundle) {
  validate_weights(w);
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("TSF-KAD: lambda must lie in (0,1]");
  if (inst.arrival_model != ArrivalModel::Kad) throw std::invalid_argument("TSF-KAD requires a KAD instance");
  require_valid(inst, {.require_unit_success_for_kad = true});
  if (bundle.model != ArrivalModel::Kad || bundle.x_star.rounds != inst.horizon ||
      bundle.x_star.edge_values.size() != inst.edges.size() * static_cast<std::size_t>(inst.horizon)) {
    throw std::invalid_argument("TSF-KAD: benchmark bundle does not belong to this instance");
  }
}

void TsfKadPolicy::play_round(int t, int type, const RhoTable& rho, Episode& episode, Rng& rng) const {
  const auto& edges = adj_.by_online[static_cast<std::size_t>(type)];
  const bool any_available =
      std::any_of(edges.begin(), edges.end(), [&](int e) { return episode.edge_available(e); });
  if (!any_available) return;
  const auto chosen = choose_objective(w_, rng);
  if (!chosen) return;

  const BenchmarkSolution& sol = bundle_->solution(*chosen);
  const double p = inst_->arrival_prob(type, t);
  // Single categorical draw over the available edges; the leftover mass
  // (which includes edges whose endpoint is gone) is a rejection.
  thread_local std::vector<double> q;
  q.assign(edges.size(), 0.0);
  double total = 0.0;
  int clamped = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const int e = edges[i];
    if (!episode.edge_available(e)) continue;
    const double x = sol.value(e, t);
    if (x <= 0.0) continue;
    double prob = (x / p) * (lambda_ / rho.at(e, t));
    if (!(prob <= 1.0)) {
      prob = 1.0;
      ++clamped;
    }
    q[i] = prob;
    total += prob;
  }
  if (total > 1.0 + 1e-12) ++clamped;
  episode.mutable_trace().clamped_probes += clamped;

  const double r = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (q[i] <= 0.0) continue;
    acc += q[i];
    if (r < acc) {
      episode.probe(edges[i], rng);
      return;
    }
  }
}

RunTrace TsfKadPolicy::run(const RhoTable& rho, std::uint64_t seed) const {
  if (!(rho.weights == w_) || rho.lambda != lambda_ || rho.rounds != inst_->horizon ||
      rho.edge_offline.size() != inst_->edges.size()) {
    throw std::invalid_argument("TSF-KAD: rho table was estimated for a different configuration");
  }
  Episode episode(*inst_);
  for (int t = 0; t < inst_->horizon; ++t) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int v = arrivals_.sample(t, rng);
    episode.begin_round(t, v);
    play_round(t, v, rho, episode, rng);
  }
  return std::move(episode).finish();
}

RhoTable estimate_rho(const TsfKadPolicy& policy, int simulations, std::uint64_t seed, Execution exec) {
  if (simulations < 1) throw std::invalid_argument("estimate_rho: at least one simulation is required");
  const Instance& inst = policy.instance();
  RhoTable rho = RhoTable::ones(inst, policy.weights(), policy.lambda());
  rho.simulations = simulations;

  std::vector<Episode> particles(static_cast<std::size_t>(simulations), Episode(inst));
  const auto nu = inst.offline.size();
  const auto rounds = static_cast<std::size_t>(inst.horizon);
  for (int t = 0; t + 1 < inst.horizon; ++t) {
    const long n = simulations;
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
    for (long s = 0; s < n; ++s) {
      Episode& ep = particles[static_cast<std::size_t>(s)];
      Rng rng = make_rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(s)), static_cast<std::uint64_t>(t)));
      const int v = policy.arrivals().sample(t, rng);
      ep.begin_round(t, v);
      policy.play_round(t, v, rho, ep, rng);
    }
    for (std::size_t u = 0; u < nu; ++u) {
      int unmatched = 0;
      for (const auto& ep : particles) unmatched += ep.state().matched(static_cast<int>(u)) ? 0 : 1;
      rho.by_offline[u * rounds + static_cast<std::size_t>(t) + 1] = static_cast<double>(unmatched) / simulations;
    }
  }
  return rho;
}

RunTrace run_tsf_kad(const Instance& inst, const BenchmarkBundle& bundle, Weights w, const RhoTable& rho,
                     std::uint64_t seed, double lambda) {
  return TsfKadPolicy(inst, bundle, w, lambda).run(rho, seed);
}

// ---------------------------------------------------------------------------

Instance reduce_individual_to_group(const Instance& inst) {
  require_valid(inst);
  const int T = inst.horizon;
  const auto nv = static_cast<int>(inst.online.size());
  Instance out;
  out.arrival_model = ArrivalModel::Kad;
  out.horizon = T;
  out.utility_shift = inst.utility_shift;
  for (std::size_t u = 0; u < inst.offline.size(); ++u) out.groups.push_back("u" + std::to_string(u));
  for (int t = 0; t < T; ++t) out.groups.push_back("t" + std::to_string(t));

  out.offline = inst.offline;
  for (std::size_t u = 0; u < out.offline.size(); ++u) out.offline[u].group = static_cast<GroupId>(u);

  const auto round_group = static_cast<GroupId>(inst.offline.size());
  for (int t = 0; t < T; ++t) {
    for (int v = 0; v < nv; ++v) {
      OnlineType copy = inst.online[static_cast<std::size_t>(v)];
      copy.id = t * nv + v;
      copy.group = round_group + t;
      copy.p = 0.0;
      copy.p_t.assign(static_cast<std::size_t>(T), 0.0);
      copy.p_t[static_cast<std::size_t>(t)] = inst.arrival_prob(v, t);
      copy.origin = v;
      out.online.push_back(std::move(copy));
    }
    for (const auto& e : inst.edges) {
      Edge copy = e;
      copy.v = t * nv + e.v;
      out.edges.push_back(copy);
    }
  }
  return out;
}

}  // namespace fairmatch
