#pragma once

// Decision procedures for H0: theta_{h,t} >= 0 at every index.
//
// Each test computes a statistic and rejects iff statistic >= critical value.
// All statistics depend on the field only through theta_hat / sigma_h.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "monotest/calibration.hpp"
#include "monotest/haar.hpp"
#include "monotest/priors.hpp"

namespace monotest {

enum class Decision { retain_H0, reject_H0 };

enum class TestKind {
  single_simple,
  single_bayes,
  single_map,
  multilevel_map,
  multilevel_bayes,
  adaptive_map,
};

[[nodiscard]] std::string_view to_string(Decision d) noexcept;
[[nodiscard]] std::string_view to_string(TestKind k) noexcept;

struct TestReport {
  TestKind kind = TestKind::multilevel_map;
  Decision decision = Decision::retain_H0;
  double statistic = 0.0;
  double critical_value = 0.0;
  double alpha = 0.05;
  /// Level contribution: Z^M + log pi (MAP kinds) or pi (Z^B - log(1/pi)) (Bayes).
  std::map<int, double> per_level;
  std::optional<DyadicIndex> argmax;
  /// Prior mass on levels the field does not carry.
  double discarded_prior_mass = 0.0;

  [[nodiscard]] bool rejects() const noexcept { return decision == Decision::reject_H0; }
  /// Flat key=value record, one pair per line, fixed key order.
  [[nodiscard]] std::string to_record() const;
};

[[nodiscard]] inline Decision decide(double statistic, double critical_value) noexcept {
  return statistic >= critical_value ? Decision::reject_H0 : Decision::retain_H0;
}

/// Most powerful test for one coefficient: rejects iff theta_hat <= -sigma_h t_alpha
/// with Phi(t_alpha) = 1 - alpha. The score form S(theta_hat/sigma_h) >= S(-t_alpha)
/// is evaluated as well and must agree (std::logic_error otherwise).
/// Statistic -theta_hat/sigma_h, critical value t_alpha.
[[nodiscard]] TestReport single_level_simple(double theta_hat, double sigma_h, double alpha);

/// exp(-(theta_hat^2 / 2 sigma_h^2) sign(theta_hat)). Rejecting when it exceeds
/// exp(t_alpha^2 / 2) gives the same decisions as single_level_simple.
[[nodiscard]] double single_level_ml_statistic(double theta_hat, double sigma_h);
[[nodiscard]] double single_level_ml_log_statistic(double theta_hat, double sigma_h);

struct BayesLevel {
  double B = 0.0;      // (1/n_h) sum_t S(theta_hat/sigma_h), saturating
  double log_B = 0.0;
  double Z = 0.0;      // B - log n_h - gamma + 1
};

/// Throws std::domain_error when sigma_h of the level is not positive.
[[nodiscard]] BayesLevel bayes_level_statistic(const CoefficientField& field, int level);

struct MapLevel {
  double Z = 0.0;  // max_t log[S(theta_hat/sigma_h) / n_h]
  std::uint64_t position = 0;  // first maximizing t
};

[[nodiscard]] MapLevel map_level_statistic(const CoefficientField& field, int level);

enum class SingleLevelKind { bayes, map };

/// Single-level test against a calibrated critical value from `calib`
/// (bayes_single: B >= t^B; map_single: Z^M >= log t^M). A missing entry
/// raises CalibrationMissing naming the command that produces it.
[[nodiscard]] TestReport single_level_test(const CoefficientField& field, int level, double alpha,
                                           SingleLevelKind kind, const CalibrationStore& calib);

/// sup_h {Z_h^M + log pi_h} >= q_alpha^kappa. The prior is truncated to the
/// field's levels and renormalized. Ties go to the coarsest level, then the
/// smallest t.
[[nodiscard]] TestReport multilevel_map_test(const CoefficientField& field, const PriorOnLevels& prior, double alpha);

/// sum_h pi_h (Z_h^B - log(1/pi_h)) >= q_alpha^o, with q_alpha^o the zeta_circ
/// entry of truncation K in `calib`.
[[nodiscard]] TestReport multilevel_bayes_test(const CoefficientField& field, const PriorOnLevels& prior,
                                               double alpha, const CalibrationStore& calib,
                                               std::uint64_t zeta_truncation = 1'000'000);

/// Same statistic for a caller-supplied q_alpha^o.
[[nodiscard]] TestReport multilevel_bayes_test(const CoefficientField& field, const PriorOnLevels& prior,
                                               double alpha, double critical_value);

/// max_h {Z_h^M + log Pi_h} >= q_alpha^kappa over the field's levels. Pi is
/// not renormalized; the mass on absent levels is reported.
[[nodiscard]] TestReport adaptive_map_test(const CoefficientField& field, const AdaptiveWeights& weights,
                                           double alpha);

enum class SnrKind { R, R_tilde, R_plus };

/// R_h(q, H) = 2a - log(4 pi a), a = q + log n_h + H. R_tilde takes H = log omega
/// and R_plus = R_tilde + log log omega; for those kinds `h_or_omega` is omega.
/// Throws std::domain_error when a <= 0.
[[nodiscard]] double critical_snr(SnrKind kind, std::uint64_t n_h, double q, double h_or_omega);

}  // namespace monotest
