#include <algorithm>
#include <cmath>

#include "pmm/simd/kernels.hpp"

namespace pmm::simd {

namespace {

void porous_stencil(const double* rho, double* out, std::size_t count, double lambda) {
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double sl = rho[i - 1] * rho[i - 1];
    const double sc = rho[i] * rho[i];
    const double sr = rho[i + 1] * rho[i + 1];
    out[i] = rho[i] + lambda * ((sr - 2.0 * sc) + sl);
  }
}

double dot(const double* w, const double* v, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += w[i] * v[i];
  return s;
}

AbsDiff abs_diff(const double* a, const double* b, std::size_t count) {
  AbsDiff r;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    r.sum += d;
    r.max = std::max(r.max, d);
  }
  return r;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, porous_stencil, dot, abs_diff};
  return table;
}

}  // namespace pmm::simd
