#include "pmm/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace pmm::simd {

#ifdef PMM_BUILD_AVX2
const KernelTable* avx2_table();
#endif

namespace {

bool env_forces_scalar() {
  const char* v = std::getenv("PMM_FORCE_SCALAR");
  return v != nullptr && std::strcmp(v, "0") != 0 && *v != '\0';
}

std::atomic<bool>& forced() {
  static std::atomic<bool> flag{env_forces_scalar()};
  return flag;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* avx2_kernels() {
#ifdef PMM_BUILD_AVX2
  return avx2_table();
#else
  return nullptr;
#endif
}

const KernelTable& kernels() {
  if (!forced().load(std::memory_order_relaxed) && cpu_has_avx2())
    if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

void force_scalar(bool on) { forced().store(on, std::memory_order_relaxed); }

}  // namespace pmm::simd
