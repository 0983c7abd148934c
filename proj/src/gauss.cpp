#include "monotest/gauss.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <stdexcept>
#include <string>

namespace monotest {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210484903;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640561764;
constexpr double kMillsSwitch = -37.0;

// Mills ratio (1 - Phi(a)) / phi(a) for a >= 37 by backward evaluation of
// the continued fraction 1/(a+ 1/(a+ 2/(a+ 3/(a+ ...)))).
double mills_ratio_large(double a) {
  double tail = a;
  for (int k = 40; k >= 1; --k) tail = a + k / tail;
  return 1.0 / tail;
}

}  // namespace

double normal_cdf(double x) noexcept {
  if (x < kMillsSwitch) return std::exp(log_normal_cdf(x));
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double normal_sf(double x) noexcept { return normal_cdf(-x); }

double log_normal_cdf(double x) noexcept {
  if (x < kMillsSwitch) {
    const double a = -x;
    return -0.5 * a * a - kLogSqrt2Pi + std::log(mills_ratio_large(a));
  }
  if (x <= 0.0) return std::log(0.5 * std::erfc(-x * kInvSqrt2));
  return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  return -boost::math::erfc_inv(2.0 * p) / kInvSqrt2;
}

ScoreValue score(double x) noexcept {
  return ScoreValue{log_normal_cdf(-x) - log_normal_cdf(x)};
}

ScoreValue score_asymptotic(double x) {
  if (!(x < 0.0)) throw std::domain_error("score_asymptotic: expansion requires x < 0");
  return ScoreValue{0.5 * x * x + kLogSqrt2Pi + std::log1p(-x)};
}

double critical_snr_root(double z) {
  if (!(z >= 1.0)) throw std::domain_error("critical_snr_root: z must be >= 1 = S(0)");
  return critical_snr_root_log(std::log(z));
}

double critical_snr_root_log(double log_z) {
  if (!(log_z >= 0.0)) throw std::domain_error("critical_snr_root_log: log z must be >= 0");
  if (log_z == 0.0) return 0.0;

  auto excess = [log_z](double s) { return score(-s).log_s - log_z; };

  double lo = 0.0;
  double hi = 40.0;
  while (excess(hi) < 0.0) hi *= 2.0;

  while (hi - lo > 1e-12 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double s = 0.5 * (lo + hi);

  // d/ds log S(-s) = phi(s) / (Phi(-s) Phi(s))
  for (int step = 0; step < 2; ++step) {
    const double slope =
        std::exp(-0.5 * s * s - kLogSqrt2Pi - log_normal_cdf(-s) - log_normal_cdf(s));
    if (!(slope > 0.0) || !std::isfinite(slope)) break;
    const double next = s - excess(s) / slope;
    if (next < 0.0) break;
    s = next;
  }
  return s * s;
}

double critical_snr_expansion_log(double log_z) {
  if (!(log_z > 0.0)) throw std::domain_error("critical_snr_expansion_log: log z must be > 0");
  return 2.0 * log_z - std::log(4.0 * kPi * log_z);
}

}  // namespace monotest
