#pragma once

// Instance JSON (schema_version 1):
//
//   {
//     "schema_version": 1,
//     "horizon": T,
//     "arrival_model": "kiid" | "kad",
//     "groups": ["name", ...],
//     "offline": [{"id": 0, "group": "name", "patience": 3}, ...],
//     "online":  [{"id": 0, "group": "name", "patience": 1, "p": 0.5}, ...]   // kiid
//                [{"id": 0, "group": "name", "patience": 1, "p_t": [..T..]}]  // kad
//     "edges":   [{"u": 0, "v": 0, "p_e": 1, "w_op": 1, "w_off": 0, "w_on": 0}, ...],
//     "metadata": {"utility_shift": 0}      // optional
//   }

#include <filesystem>
#include <string>

#include "json.hpp"

#include "fairmatch/model.hpp"

namespace fairmatch {

inline constexpr int kInstanceSchemaVersion = 1;

[[nodiscard]] nlohmann::json instance_to_json(const Instance& inst);

/// Throws std::invalid_argument on schema errors (wrong version, unknown
/// group name, missing keys). Does not check instance invariants.
[[nodiscard]] Instance instance_from_json(const nlohmann::json& j);

[[nodiscard]] Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

}  // namespace fairmatch
