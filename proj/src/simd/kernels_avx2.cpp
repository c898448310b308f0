#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "pmm/simd/kernels.hpp"

namespace pmm::simd {

namespace {

void porous_stencil(const double* rho, double* out, std::size_t count, double lambda) {
  if (count < 3) return;
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d lam = _mm256_set1_pd(lambda);
  std::size_t i = 1;
  for (; i + 4 < count; i += 4) {
    const __m256d l = _mm256_loadu_pd(rho + i - 1);
    const __m256d c = _mm256_loadu_pd(rho + i);
    const __m256d r = _mm256_loadu_pd(rho + i + 1);
    const __m256d sl = _mm256_mul_pd(l, l);
    const __m256d sc = _mm256_mul_pd(c, c);
    const __m256d sr = _mm256_mul_pd(r, r);
    const __m256d lap = _mm256_add_pd(_mm256_sub_pd(sr, _mm256_mul_pd(two, sc)), sl);
    _mm256_storeu_pd(out + i, _mm256_add_pd(c, _mm256_mul_pd(lam, lap)));
  }
  for (; i + 1 < count; ++i) {
    const double sl = rho[i - 1] * rho[i - 1];
    const double sc = rho[i] * rho[i];
    const double sr = rho[i + 1] * rho[i + 1];
    out[i] = rho[i] + lambda * ((sr - 2.0 * sc) + sl);
  }
}

double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot(const double* w, const double* v, std::size_t count) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(v + i)));
  double s = hsum(acc);
  for (; i < count; ++i) s += w[i] * v[i];
  return s;
}

AbsDiff abs_diff(const double* a, const double* b, std::size_t count) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d sum = _mm256_setzero_pd();
  __m256d mx = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d d =
        _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    sum = _mm256_add_pd(sum, d);
    mx = _mm256_max_pd(mx, d);
  }
  AbsDiff r;
  r.sum = hsum(sum);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, mx);
  r.max = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < count; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    r.sum += d;
    r.max = std::max(r.max, d);
  }
  return r;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::Avx2, porous_stencil, dot, abs_diff};
  return &table;
}

}  // namespace pmm::simd
