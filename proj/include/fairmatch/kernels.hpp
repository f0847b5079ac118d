#pragma once

// Data-parallel inner loops. Each kernel has a serial reference path kept for
// testing and benchmarking; both paths produce bit-identical results because
// the parallel loop partitions independent rows / trials.

#include <cstddef>
#include <span>

namespace fairmatch {

enum class Execution { Serial, Parallel };

/// Number of worker threads the parallel paths use.
[[nodiscard]] int worker_threads();
void set_worker_threads(int n);

/// Gauss-Jordan elimination step on a dense row-major tableau of `rows` rows
/// and `cols` columns: row `pivot_row` is scaled so that the pivot entry is 1,
/// then eliminated from every other row.
void pivot_tableau(std::span<double> tableau, std::size_t rows, std::size_t cols,
                   std::size_t pivot_row, std::size_t pivot_col, Execution exec);

}  // namespace fairmatch
