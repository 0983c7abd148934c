#pragma once

// Data-parallel inner loops of the Monte Carlo and transform code.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2 variant.
// The variant is chosen once at startup from CPUID; MONOTEST_SIMD=scalar in
// the environment (or force_backend) pins the reference path. Reductions may
// differ between backends in the last bits because of summation order; the
// element-wise kernels are bit-identical.

#include <cstdint>
#include <span>
#include <string_view>

namespace monotest::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
  // sum_i (1/u_i - 1)
  double (*sum_inverse_minus_one)(const double* u, std::size_t n);
  // sum_i 1/x_i
  double (*sum_inverse)(const double* x, std::size_t n);
  // sum_i (1/x_i - 1/(first_k + i))
  double (*sum_inverse_gap)(const double* x, std::size_t n, std::uint64_t first_k);
  double (*min_value)(const double* x, std::size_t n);
  double (*max_value)(const double* x, std::size_t n);
  // sums[j] = in[2j] + in[2j+1], diffs[j] = in[2j+1] - in[2j], j < n_pairs
  void (*pair_sum_diff)(const double* in, double* sums, double* diffs, std::size_t n_pairs);
};

/// Backend currently in use.
[[nodiscard]] Backend active_backend() noexcept;
[[nodiscard]] std::string_view backend_name(Backend b) noexcept;

/// True when the CPU and build both support the backend.
[[nodiscard]] bool backend_available(Backend b) noexcept;

/// Switches backends for the whole process (test hook). Returns false and
/// leaves the selection unchanged when the backend is unavailable.
bool force_backend(Backend b) noexcept;

[[nodiscard]] const KernelTable& kernels() noexcept;
[[nodiscard]] const KernelTable& kernels_for(Backend b) noexcept;

namespace scalar {
double sum_inverse_minus_one(const double* u, std::size_t n);
double sum_inverse(const double* x, std::size_t n);
double sum_inverse_gap(const double* x, std::size_t n, std::uint64_t first_k);
double min_value(const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
void pair_sum_diff(const double* in, double* sums, double* diffs, std::size_t n_pairs);
}  // namespace scalar

#if defined(MONOTEST_HAVE_AVX2)
namespace avx2 {
double sum_inverse_minus_one(const double* u, std::size_t n);
double sum_inverse(const double* x, std::size_t n);
double sum_inverse_gap(const double* x, std::size_t n, std::uint64_t first_k);
double min_value(const double* x, std::size_t n);
double max_value(const double* x, std::size_t n);
void pair_sum_diff(const double* in, double* sums, double* diffs, std::size_t n_pairs);
}  // namespace avx2
#endif

// Span conveniences over the active table.
inline double sum_inverse_minus_one(std::span<const double> u) {
  return kernels().sum_inverse_minus_one(u.data(), u.size());
}
inline double sum_inverse(std::span<const double> x) {
  return kernels().sum_inverse(x.data(), x.size());
}
inline double sum_inverse_gap(std::span<const double> x, std::uint64_t first_k) {
  return kernels().sum_inverse_gap(x.data(), x.size(), first_k);
}
inline double min_value(std::span<const double> x) { return kernels().min_value(x.data(), x.size()); }
inline double max_value(std::span<const double> x) { return kernels().max_value(x.data(), x.size()); }

}  // namespace monotest::simd
