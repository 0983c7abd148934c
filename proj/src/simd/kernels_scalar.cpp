#include "monotest/simd_kernels.hpp"

#include <limits>

namespace monotest::simd::scalar {

double sum_inverse_minus_one(const double* u, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += 1.0 / u[i] - 1.0;
  return acc;
}

double sum_inverse(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += 1.0 / x[i];
  return acc;
}

double sum_inverse_gap(const double* x, std::size_t n, std::uint64_t first_k) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += 1.0 / x[i] - 1.0 / static_cast<double>(first_k + i);
  }
  return acc;
}

double min_value(const double* x, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = x[i] < m ? x[i] : m;
  return m;
}

double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

void pair_sum_diff(const double* in, double* sums, double* diffs, std::size_t n_pairs) {
  for (std::size_t j = 0; j < n_pairs; ++j) {
    const double left = in[2 * j];
    const double right = in[2 * j + 1];
    sums[j] = left + right;
    diffs[j] = right - left;
  }
}

}  // namespace monotest::simd::scalar
