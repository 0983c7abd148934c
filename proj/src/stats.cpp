#include "monotest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "monotest/random.hpp"

namespace monotest {

double quantile_type7_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile level must lie in [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile_type7(std::span<const double> data, double p) {
  std::vector<double> copy(data.begin(), data.end());
  std::sort(copy.begin(), copy.end());
  return quantile_type7_sorted(copy, p);
}

double bootstrap_quantile_stderr(std::span<const double> data, double p, int resamples, std::uint64_t seed) {
  if (data.size() < 2 || resamples < 2) return 0.0;
  // Resampling the sorted sample is equivalent and lets each replicate be
  // rebuilt from counts instead of a full sort.
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  Engine eng = make_engine(seed, 0xb007);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::uint32_t> counts(n);
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);

  std::vector<double> q(static_cast<std::size_t>(resamples));
  for (double& qi : q) {
    std::fill(counts.begin(), counts.end(), 0u);
    for (std::size_t i = 0; i < n; ++i) ++counts[pick(eng)];
    // walk the cumulative counts to the order statistics lo and lo + 1
    std::size_t cum = 0;
    double x_lo = sorted.back();
    double x_hi = sorted.back();
    bool have_lo = false;
    for (std::size_t i = 0; i < n; ++i) {
      cum += counts[i];
      if (!have_lo && cum > lo) {
        x_lo = sorted[i];
        have_lo = true;
      }
      if (cum > lo + 1) {
        x_hi = sorted[i];
        break;
      }
    }
    if (lo + 1 >= n) x_hi = x_lo;
    qi = x_lo + frac * (x_hi - x_lo);
  }
  return std::sqrt(sample_variance(q));
}

std::size_t count_at_least(std::span<const double> sorted, double x) {
  return static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), x));
}

double mean(std::span<const double> data) {
  if (data.empty()) return 0.0;
  double s = 0.0;
  for (double v : data) s += v;
  return s / static_cast<double>(data.size());
}

double sample_variance(std::span<const double> data) {
  if (data.size() < 2) return 0.0;
  const double m = mean(data);
  double s = 0.0;
  for (double v : data) s += (v - m) * (v - m);
  return s / static_cast<double>(data.size() - 1);
}

}  // namespace monotest
