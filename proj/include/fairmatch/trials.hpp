#pragma once

// Independent Monte-Carlo trials. Trial i always runs with seed
// derive_seed(root, i), so the serial and parallel paths return identical
// trace vectors.

#include <cstdint>
#include <exception>
#include <vector>

#include "fairmatch/kernels.hpp"
#include "fairmatch/model.hpp"
#include "fairmatch/random.hpp"

namespace fairmatch {

/// Runs `fn(seed) -> RunTrace` for n trials. The first exception thrown by
/// any trial is rethrown after the loop.
template <class Fn>
std::vector<RunTrace> run_trials(int n, std::uint64_t root_seed, Fn&& fn, Execution exec = Execution::Parallel) {
  std::vector<RunTrace> traces(static_cast<std::size_t>(n > 0 ? n : 0));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 64) if (exec == Execution::Parallel)
  for (int i = 0; i < n; ++i) {
    try {
      traces[static_cast<std::size_t>(i)] = fn(derive_seed(root_seed, static_cast<std::uint64_t>(i)));
    } catch (...) {
#pragma omp critical(fairmatch_trial_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return traces;
}

}  // namespace fairmatch
