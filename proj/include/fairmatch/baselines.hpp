#pragma once

// Greedy comparison heuristics. Each arrival probes available neighbors in a
// fixed priority order until a success or its patience runs out; ties go to
// the lower edge (or group) index.

#include <cstdint>

#include "fairmatch/model.hpp"

namespace fairmatch {

/// Priority: descending p_e * w^O_e.
[[nodiscard]] RunTrace greedy_o(const Instance& inst, std::uint64_t seed);

/// Priority: descending p_e * w^V_e.
[[nodiscard]] RunTrace greedy_r(const Instance& inst, std::uint64_t seed);

/// Picks the offline group with the lowest realized utility per member so
/// far that still has an available neighbor of the arrival, then probes that
/// group's available neighbors in descending w^U_e order.
[[nodiscard]] RunTrace greedy_d(const Instance& inst, std::uint64_t seed);

}  // namespace fairmatch
