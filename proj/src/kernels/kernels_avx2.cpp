#include "ctrans/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

// Built with -mavx2 but not -mfma: multiplies and adds stay separate so the
// lanes round exactly like the scalar reference.
namespace ctrans::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void cost_row(const double* point, const double* targets, std::size_t m, int dim, int p,
              double* out) {
  if (p != 1 && p != 2) {
    scalar_table().cost_row(point, targets, m, dim, p, out);
    return;
  }
  const std::size_t m4 = m - m % 4;
  for (std::size_t j = 0; j < m4; j += 4) {
    __m256d s = _mm256_setzero_pd();
    for (int a = 0; a < dim; ++a) {
      const __m256d d = _mm256_sub_pd(_mm256_set1_pd(point[a]), _mm256_loadu_pd(targets + a * m + j));
      s = _mm256_add_pd(s, _mm256_mul_pd(d, d));
    }
    if (p == 1) s = _mm256_sqrt_pd(s);
    _mm256_storeu_pd(out + j, s);
  }
  for (std::size_t j = m4; j < m; ++j) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = point[a] - targets[a * m + j];
      s += d * d;
    }
    out[j] = p == 2 ? s : std::sqrt(s);
  }
}

// Lane-wise minima keep the first index per lane; the horizontal reduction
// then prefers the smaller index on equal values, which reproduces the
// scalar left-to-right scan.
ScanResult reduce(__m256d val, __m256d idx) {
  alignas(32) double v[4], ix[4];
  _mm256_store_pd(v, val);
  _mm256_store_pd(ix, idx);
  ScanResult r{kInf, -1};
  for (int k = 0; k < 4; ++k) {
    if (ix[k] < 0.0) continue;
    const auto i = static_cast<std::int64_t>(ix[k]);
    if (v[k] < r.value || (v[k] == r.value && (r.index < 0 || i < r.index))) r = {v[k], i};
  }
  return r;
}

ScanResult relax_row(const double* row, double offset, const double* col, const double* mask,
                     double* best, std::int64_t* from, std::int64_t tag, std::size_t m) {
  const __m256d voff = _mm256_set1_pd(offset);
  const __m256d vzero = _mm256_setzero_pd();
  const __m256d vtag = _mm256_castsi256_pd(_mm256_set1_epi64x(tag));
  __m256d bval = _mm256_set1_pd(kInf);
  __m256d bidx = _mm256_set1_pd(-1.0);
  __m256d jv = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d four = _mm256_set1_pd(4.0);
  const std::size_t m4 = m - m % 4;
  for (std::size_t j = 0; j < m4; j += 4) {
    const __m256d active = _mm256_cmp_pd(_mm256_loadu_pd(mask + j), vzero, _CMP_EQ_OQ);
    const __m256d cur = _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(row + j), voff),
                                      _mm256_loadu_pd(col + j));
    __m256d b = _mm256_loadu_pd(best + j);
    const __m256d upd = _mm256_and_pd(active, _mm256_cmp_pd(cur, b, _CMP_LT_OQ));
    b = _mm256_blendv_pd(b, cur, upd);
    _mm256_storeu_pd(best + j, b);
    const __m256d f = _mm256_loadu_pd(reinterpret_cast<const double*>(from + j));
    _mm256_storeu_pd(reinterpret_cast<double*>(from + j), _mm256_blendv_pd(f, vtag, upd));
    const __m256d take = _mm256_and_pd(active, _mm256_cmp_pd(b, bval, _CMP_LT_OQ));
    bval = _mm256_blendv_pd(bval, b, take);
    bidx = _mm256_blendv_pd(bidx, jv, take);
    jv = _mm256_add_pd(jv, four);
  }
  ScanResult r = reduce(bval, bidx);
  for (std::size_t j = m4; j < m; ++j) {
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
  const __m256d vzero = _mm256_setzero_pd();
  __m256d bval = _mm256_set1_pd(kInf);
  __m256d bidx = _mm256_set1_pd(-1.0);
  __m256d jv = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d four = _mm256_set1_pd(4.0);
  const std::size_t m4 = m - m % 4;
  for (std::size_t j = 0; j < m4; j += 4) {
    const __m256d active = _mm256_cmp_pd(_mm256_loadu_pd(mask + j), vzero, _CMP_EQ_OQ);
    const __m256d v = _mm256_loadu_pd(values + j);
    const __m256d take = _mm256_and_pd(active, _mm256_cmp_pd(v, bval, _CMP_LT_OQ));
    bval = _mm256_blendv_pd(bval, v, take);
    bidx = _mm256_blendv_pd(bidx, jv, take);
    jv = _mm256_add_pd(jv, four);
  }
  ScanResult r = reduce(bval, bidx);
  for (std::size_t j = m4; j < m; ++j)
    if (mask[j] == 0.0 && values[j] < r.value) r = {values[j], static_cast<std::int64_t>(j)};
  return r;
}

void shift_masked(double* values, const double* mask, double select, double delta, std::size_t m) {
  const __m256d vsel = _mm256_set1_pd(select);
  const __m256d vdelta = _mm256_set1_pd(delta);
  const std::size_t m4 = m - m % 4;
  for (std::size_t j = 0; j < m4; j += 4) {
    const __m256d v = _mm256_loadu_pd(values + j);
    const __m256d hit = _mm256_cmp_pd(_mm256_loadu_pd(mask + j), vsel, _CMP_EQ_OQ);
    _mm256_storeu_pd(values + j, _mm256_blendv_pd(v, _mm256_sub_pd(v, vdelta), hit));
  }
  for (std::size_t j = m4; j < m; ++j)
    if (mask[j] == select) values[j] -= delta;
}

double weighted_sum(const double* w, const double* f, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t j = 0; j < n4; j += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + j), _mm256_loadu_pd(f + j)));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t j = n4; j < n; ++j) s += w[j] * f[j];
  return s;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{"avx2", cost_row, relax_row, argmin_masked, shift_masked,
                                 weighted_sum};
  return table;
}

}  // namespace ctrans::kernels
