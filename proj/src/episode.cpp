#include "fairmatch/episode.hpp"

#include <algorithm>
#include <cassert>

namespace fairmatch {

AvailabilityState::AvailabilityState(const Instance& inst)
    : matched_(inst.offline.size(), 0), failed_(inst.offline.size(), 0) {
  patience_.reserve(inst.offline.size());
  for (const auto& u : inst.offline) patience_.push_back(u.patience);
}

void AvailabilityState::record(int u, bool success) {
  assert(available(u));
  const auto i = static_cast<std::size_t>(u);
  if (success) {
    matched_[i] = 1;
  } else {
    ++failed_[i];
  }
}

ArrivalSampler::ArrivalSampler(const Instance& inst) {
  stationary_ = inst.arrival_model == ArrivalModel::Kiid;
  const int rounds = stationary_ ? 1 : inst.horizon;
  cdf_.resize(static_cast<std::size_t>(rounds));
  for (int t = 0; t < rounds; ++t) {
    auto& cdf = cdf_[static_cast<std::size_t>(t)];
    double acc = 0.0;
    for (int v = 0; v < static_cast<int>(inst.online.size()); ++v) {
      acc += inst.arrival_prob(v, t);
      cdf.push_back(acc);
    }
  }
}

int ArrivalSampler::sample(int round, Rng& rng) const {
  const auto& cdf = cdf_[stationary_ ? 0 : static_cast<std::size_t>(round)];
  // Scale by the total so mass within tolerance of 1 still covers [0, 1).
  const double r = uniform01(rng) * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

Episode::Episode(const Instance& inst) : inst_(&inst), state_(inst) {
  trace_.off_utility.assign(inst.offline.size(), 0.0);
  trace_.on_utility.assign(static_cast<std::size_t>(inst.horizon), 0.0);
  trace_.events.reserve(static_cast<std::size_t>(inst.horizon));
}

void Episode::begin_round(int round, int type) { trace_.events.push_back({round, type, {}}); }

bool Episode::probe(int e, Rng& rng) {
  const Edge& edge = inst_->edges[static_cast<std::size_t>(e)];
  auto& ev = trace_.events.back();
  assert(edge.v == ev.type);
  const bool success = edge.success_prob >= 1.0 || bernoulli(rng, edge.success_prob);
  state_.record(edge.u, success);
  ev.probes.push_back({e, success});
  if (success) {
    trace_.op_utility += edge.w_op;
    trace_.off_utility[static_cast<std::size_t>(edge.u)] += edge.w_off;
    trace_.on_utility[static_cast<std::size_t>(ev.round)] += edge.w_on;
  }
  return success;
}

}  // namespace fairmatch
