#include "ctrans/kernels.hpp"

#include <cmath>
#include <limits>

namespace ctrans::kernels {

namespace {

void cost_row(const double* point, const double* targets, std::size_t m, int dim, int p,
              double* out) {
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = point[a] - targets[a * m + j];
      s += d * d;
    }
    out[j] = p == 2 ? s : p == 1 ? std::sqrt(s) : std::pow(std::sqrt(s), p);
  }
}

ScanResult relax_row(const double* row, double offset, const double* col, const double* mask,
                     double* best, std::int64_t* from, std::int64_t tag, std::size_t m) {
  ScanResult r{std::numeric_limits<double>::infinity(), -1};
  for (std::size_t j = 0; j < m; ++j) {
    if (mask[j] != 0.0) continue;
    const double cur = (row[j] - offset) - col[j];
    if (cur < best[j]) {
      best[j] = cur;
      from[j] = tag;
    }
    if (best[j] < r.value) r = {best[j], static_cast<std::int64_t>(j)};
  }
  return r;
}

ScanResult argmin_masked(const double* values, const double* mask, std::size_t m) {
  ScanResult r{std::numeric_limits<double>::infinity(), -1};
  for (std::size_t j = 0; j < m; ++j)
    if (mask[j] == 0.0 && values[j] < r.value) r = {values[j], static_cast<std::int64_t>(j)};
  return r;
}

void shift_masked(double* values, const double* mask, double select, double delta, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j)
    if (mask[j] == select) values[j] -= delta;
}

double weighted_sum(const double* w, const double* f, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t j = 0; j < n4; j += 4)
    for (int k = 0; k < 4; ++k) lane[k] += w[j + k] * f[j + k];
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t j = n4; j < n; ++j) s += w[j] * f[j];
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", cost_row, relax_row, argmin_masked, shift_masked,
                                 weighted_sum};
  return table;
}

}  // namespace ctrans::kernels
