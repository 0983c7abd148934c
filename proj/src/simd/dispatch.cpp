#include <atomic>
#include <cstdlib>
#include <cstring>

#include "monotest/simd_kernels.hpp"

namespace monotest::simd {
namespace {

constexpr KernelTable kScalarTable{
    scalar::sum_inverse_minus_one, scalar::sum_inverse, scalar::sum_inverse_gap,
    scalar::min_value,             scalar::max_value,   scalar::pair_sum_diff,
};

#if defined(MONOTEST_HAVE_AVX2)
constexpr KernelTable kAvx2Table{
    avx2::sum_inverse_minus_one, avx2::sum_inverse, avx2::sum_inverse_gap,
    avx2::min_value,             avx2::max_value,   avx2::pair_sum_diff,
};
#endif

bool cpu_has_avx2() noexcept {
#if defined(MONOTEST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("MONOTEST_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Backend::scalar;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& selected() noexcept {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

Backend active_backend() noexcept { return selected().load(std::memory_order_relaxed); }

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) noexcept {
  if (b == Backend::scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

bool force_backend(Backend b) noexcept {
  if (!backend_available(b)) return false;
  selected().store(b, std::memory_order_relaxed);
  return true;
}

const KernelTable& kernels_for(Backend b) noexcept {
#if defined(MONOTEST_HAVE_AVX2)
  if (b == Backend::avx2 && backend_available(Backend::avx2)) return kAvx2Table;
#else
  (void)b;
#endif
  return kScalarTable;
}

const KernelTable& kernels() noexcept { return kernels_for(active_backend()); }

}  // namespace monotest::simd
