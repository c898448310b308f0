#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pmm/pme.hpp"
#include "pmm/simd/kernels.hpp"

using namespace pmm;

namespace {

std::vector<double> random_values(std::size_t count, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(count);
  for (double& x : v) x = d(gen);
  return v;
}

}  // namespace

TEST_CASE("vector kernels match the scalar reference") {
  const simd::KernelTable* avx = simd::avx2_kernels();
  if (avx == nullptr || !simd::cpu_has_avx2()) {
    MESSAGE("AVX2 variant not available on this build or CPU; only the scalar table is tested");
    return;
  }
  const simd::KernelTable& ref = simd::scalar_kernels();
  CHECK(avx->isa == simd::Isa::Avx2);
  std::mt19937_64 gen(1);
  for (std::size_t count : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 257u, 1025u}) {
    CAPTURE(count);
    const auto rho = random_values(count, gen);
    const auto other = random_values(count, gen);
    std::vector<double> a(count, -1.0), b(count, -1.0);
    ref.porous_stencil(rho.data(), a.data(), count, 0.2);
    avx->porous_stencil(rho.data(), b.data(), count, 0.2);
    CHECK(a == b);

    const double d0 = ref.dot(rho.data(), other.data(), count);
    const double d1 = avx->dot(rho.data(), other.data(), count);
    CHECK(std::abs(d0 - d1) <= 1e-13 * std::max(1.0, std::abs(d0)));

    const simd::AbsDiff x0 = ref.abs_diff(rho.data(), other.data(), count);
    const simd::AbsDiff x1 = avx->abs_diff(rho.data(), other.data(), count);
    CHECK(x0.max == x1.max);
    CHECK(std::abs(x0.sum - x1.sum) <= 1e-13 * std::max(1.0, x0.sum));
  }
}

TEST_CASE("scalar stencil matches its definition") {
  const simd::KernelTable& ref = simd::scalar_kernels();
  const std::vector<double> rho = {0.1, 0.4, 0.3, 0.9, 0.5};
  std::vector<double> out(5, 7.0);
  ref.porous_stencil(rho.data(), out.data(), rho.size(), 0.1);
  CHECK(out[0] == 7.0);
  CHECK(out[4] == 7.0);
  for (std::size_t i = 1; i < 4; ++i) {
    const double want = rho[i] + 0.1 * ((rho[i + 1] * rho[i + 1] - 2.0 * rho[i] * rho[i]) + rho[i - 1] * rho[i - 1]);
    CHECK(out[i] == want);
  }
}

TEST_CASE("solver output does not depend on the dispatched kernels") {
  const auto bc = BoundaryCondition::robin(1.0, 0.2, 0.8);
  const auto g = [](double u) { return 0.3 + 0.4 * u * u; };
  simd::force_scalar(true);
  CHECK(simd::kernels().isa == simd::Isa::Scalar);
  const Field a = solve(g, bc, 0.1, 200);
  simd::force_scalar(false);
  const Field b = solve(g, bc, 0.1, 200);
  CHECK(a.samples.back().values == b.samples.back().values);
}
