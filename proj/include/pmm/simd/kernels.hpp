#pragma once

// Hot loops of the PDE solver and the comparison harness, with a scalar
// reference and an AVX2 variant picked at runtime.
//
// porous_stencil is elementwise and evaluates the same operations in the
// same order in both variants, so results agree bit for bit. The reductions
// use four partial sums in the vector variant and agree with the scalar
// reference up to reassociation.

#include <cstddef>

namespace pmm::simd {

enum class Isa { Scalar, Avx2 };

struct AbsDiff {
  double sum = 0.0;
  double max = 0.0;
};

struct KernelTable {
  Isa isa;
  // out[i] = rho[i] + lambda * ((rho[i+1]^2 - 2 rho[i]^2) + rho[i-1]^2)
  // for i in [1, count - 1); out[0] and out[count-1] are left untouched.
  void (*porous_stencil)(const double* rho, double* out, std::size_t count, double lambda);
  // sum_i w[i] * v[i]
  double (*dot)(const double* w, const double* v, std::size_t count);
  // sum and max of |a[i] - b[i]|
  AbsDiff (*abs_diff)(const double* a, const double* b, std::size_t count);
};

const KernelTable& scalar_kernels();
// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();

// Best table supported by this CPU unless scalar is forced.
const KernelTable& kernels();
bool cpu_has_avx2();
// Forces the scalar table (also enabled by PMM_FORCE_SCALAR=1 at startup).
void force_scalar(bool on);

}  // namespace pmm::simd
