#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops of the exact transport solvers. Every kernel has
// a scalar reference and an AVX2 variant; the variants perform the same
// floating-point operations in the same order (no FMA contraction), so their
// results are bit-identical and solver output does not depend on the CPU.
namespace ctrans::kernels {

struct ScanResult {
  double value;
  std::int64_t index;  // -1 when no active entry exists
};

struct KernelTable {
  const char* name;

  // out[j] = |x - y_j|^p for p in {1, 2}; targets stored axis-major
  // (targets[a*m + j] is coordinate a of target j).
  void (*cost_row)(const double* point, const double* targets, std::size_t m, int dim, int p,
                   double* out);

  // For every j with mask[j] == 0: cur = (row[j] - offset) - col[j]; if
  // cur < best[j] then best[j] = cur and from[j] = tag. Returns the smallest
  // best[j] over active entries, first index on ties.
  ScanResult (*relax_row)(const double* row, double offset, const double* col, const double* mask,
                          double* best, std::int64_t* from, std::int64_t tag, std::size_t m);

  ScanResult (*argmin_masked)(const double* values, const double* mask, std::size_t m);

  // values[j] -= delta wherever mask[j] == select.
  void (*shift_masked)(double* values, const double* mask, double select, double delta,
                       std::size_t m);

  // Sum of w[j]*f[j] accumulated in four interleaved lanes.
  double (*weighted_sum)(const double* w, const double* f, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the binary was built without AVX2 or the CPU lacks it.
const KernelTable* avx2_table();
// Chosen once per process; CTRANS_SIMD=scalar forces the reference kernels.
const KernelTable& active();

}  // namespace ctrans::kernels
