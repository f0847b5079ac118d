#include "fairmatch/kernels.hpp"

#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fairmatch {

int worker_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_worker_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace {

inline void eliminate_row(double* row, const double* prow, std::size_t cols, std::size_t pivot_col) {
  const double factor = row[pivot_col];
  if (factor == 0.0) return;
  for (std::size_t c = 0; c < cols; ++c) row[c] -= factor * prow[c];
  row[pivot_col] = 0.0;
}

}  // namespace

void pivot_tableau(std::span<double> tableau, std::size_t rows, std::size_t cols,
                   std::size_t pivot_row, std::size_t pivot_col, Execution exec) {
  assert(tableau.size() >= rows * cols);
  double* base = tableau.data();
  double* prow = base + pivot_row * cols;
  const double inv = 1.0 / prow[pivot_col];
  for (std::size_t c = 0; c < cols; ++c) prow[c] *= inv;
  prow[pivot_col] = 1.0;

  if (exec == Execution::Serial) {
    for (std::size_t r = 0; r < rows; ++r) {
      if (r != pivot_row) eliminate_row(base + r * cols, prow, cols, pivot_col);
    }
    return;
  }
  const auto n = static_cast<long>(rows);
  const auto skip = static_cast<long>(pivot_row);
#pragma omp parallel for schedule(static) if (rows * cols > 65536)
  for (long r = 0; r < n; ++r) {
    if (r != skip) eliminate_row(base + static_cast<std::size_t>(r) * cols, prow, cols, pivot_col);
  }
}

}  // namespace fairmatch
