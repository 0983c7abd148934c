#pragma once

// Gaussian tail primitives used by every test statistic in the library.
//
// The improper-Bayes score S(x) = 1/Phi(x) - 1 overflows doubles for
// x < -37.5, so it is carried as a natural logarithm throughout. Linear
// values are only produced on request, with explicit saturation.

#include <cmath>
#include <limits>

namespace monotest {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Log of the improper-Bayes score S(x) = 1/Phi(x) - 1.
struct ScoreValue {
  double log_s = 0.0;

  /// exp(log_s), saturating at the largest finite double.
  [[nodiscard]] double value() const noexcept {
    constexpr double kMaxLog = 709.782712893384;  // log(DBL_MAX)
    if (log_s >= kMaxLog) return std::numeric_limits<double>::max();
    return std::exp(log_s);
  }
};

/// Standard normal CDF. Uses erfc on the small side so that the lesser of
/// Phi(x) and 1 - Phi(x) keeps full relative precision out to |x| ~ 37.
[[nodiscard]] double normal_cdf(double x) noexcept;

/// 1 - Phi(x), evaluated without cancellation.
[[nodiscard]] double normal_sf(double x) noexcept;

/// log Phi(x). Below x = -37 the Mills ratio is evaluated by continued
/// fraction, so the result stays finite where Phi itself underflows.
[[nodiscard]] double log_normal_cdf(double x) noexcept;

/// Standard normal density.
[[nodiscard]] inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) * 0.39894228040143267794;
}

/// Quantile of the standard normal: returns x with Phi(x) = p, 0 < p < 1.
/// Throws std::domain_error outside (0, 1).
[[nodiscard]] double normal_quantile(double p);

/// S(x) = 1/Phi(x) - 1 in log domain. Strictly decreasing in x.
[[nodiscard]] ScoreValue score(double x) noexcept;

/// Leading-order expansion log[sqrt(2 pi)(1 - x) exp(x^2/2)] of S(x) for
/// x -> -infinity. Only meaningful for large negative x: at x = -1 it is off
/// by roughly 40%. The ratio to S(x) behaves like 1 + 1/|x|.
/// Throws std::domain_error for x >= 0.
[[nodiscard]] ScoreValue score_asymptotic(double x);

/// Root R >= 0 of S(-sqrt(R)) = z for z >= 1 (z = 1 gives R = 0).
/// Throws std::domain_error for z < 1.
[[nodiscard]] double critical_snr_root(double z);

/// Same root, parameterized by log z so that thresholds like e^{700} can be
/// passed without overflow. Requires log_z >= 0.
[[nodiscard]] double critical_snr_root_log(double log_z);

/// 2 log z - log(4 pi log z): large-z expansion of the root above.
[[nodiscard]] double critical_snr_expansion_log(double log_z);

}  // namespace monotest
