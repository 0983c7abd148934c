#pragma once

// Priors over dyadic levels k = 1, 2, ... (bandwidth h = 2^-k).

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace monotest {

/// Probability weights on levels 1..max_level, renormalized on that support.
struct PriorOnLevels {
  std::vector<double> weights;  // weights[k-1] = pi_k
  double entropy = 0.0;         // sum pi log(1/pi) on the support
  /// Mass of the untruncated prior that lies beyond the support.
  double discarded_mass = 0.0;

  /// Normalizes nonnegative weights and records entropy.
  static PriorOnLevels from_weights(std::vector<double> weights, double discarded_mass = 0.0);
  /// Uniform prior on levels 1..n.
  static PriorOnLevels uniform(int n);

  [[nodiscard]] int max_level() const noexcept { return static_cast<int>(weights.size()); }
  /// pi_k, 0 outside the support.
  [[nodiscard]] double weight(int k) const noexcept;
  /// log H (H* in the large-uncertainty condition).
  [[nodiscard]] double log_entropy() const;

  /// Drops levels above max_level and renormalizes; the dropped mass is
  /// added to discarded_mass (relative to the original untruncated prior).
  [[nodiscard]] PriorOnLevels truncated(int max_level) const;
};

class PriorTruncationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Density nu on [0, support_max] (support_max may be +inf).
/// Callers assert nu is continuous and bounded with finite entropy and
/// finite log(1 + x) moment; none of this is checked.
struct Density {
  std::string name;
  std::function<double(double)> pdf;
  double support_max = 1.0;
};

[[nodiscard]] Density uniform_density();
/// rate * exp(-rate x) on [0, inf).
[[nodiscard]] Density exponential_density(double rate = 1.0);
/// "uniform" or "exponential"; throws std::invalid_argument otherwise.
[[nodiscard]] Density density_by_name(const std::string& name);

/// pi_k proportional to nu(k / omega) for k = 1..k_max. Throws
/// PriorTruncationError if the mass beyond k_max exceeds max_discarded.
[[nodiscard]] PriorOnLevels omega_nu_prior(double omega, const Density& nu, int k_max,
                                           double max_discarded = 1e-9);

/// (1 / log H) sum pi_k |H - log(1/pi_k)|. Throws std::domain_error when H <= 1.
[[nodiscard]] double uncertainty_condition_diagnostic(const PriorOnLevels& prior);

/// psi_0(x) = 1 + log x, psi_m = psi_0(psi_{m-1}). Throws for x < 1.
[[nodiscard]] double iterated_log(int m, double x);

/// log(log x), written log* in the critical SNR of the adaptive test.
[[nodiscard]] double log_star(double x);

/// Iterated-log level weights of depth m and exponent eps:
///   L(k)  = -log[(psi_m(k)^-eps - psi_m(k+1)^-eps) / eps]
///   Lt(k) = log k + sum_{s<m} log psi_s(k) + (1 + eps) log psi_m(k)
///   Pi_k  = eps exp(-L(k)),   sum_k Pi_k = 1.
/// Differences psi_m(k+1) - psi_m(k) are propagated through log1p so that
/// L stays accurate for large k.
struct AdaptiveWeights {
  int m = 1;
  double eps = 0.1;
  std::vector<double> L;        // index k-1
  std::vector<double> L_tilde;
  std::vector<double> delta;    // L_tilde - L
  std::vector<double> psi;      // psi_m(k)
  std::vector<double> pi;       // Pi_k

  [[nodiscard]] int k_max() const noexcept { return static_cast<int>(L.size()); }
  /// log Pi_k = log eps - L(k).
  [[nodiscard]] double log_pi(int k) const;
  /// Untruncated mass beyond k_max: psi_m(k_max + 1)^-eps.
  [[nodiscard]] double tail_mass() const;
};

[[nodiscard]] AdaptiveWeights adaptive_weights(int m, double eps, int k_max);

/// sum_k Pi_k log(1/Pi_k) over k <= k_max.
[[nodiscard]] double adaptive_entropy(const AdaptiveWeights& w);

/// Cross entropy sum_k pi_k log(1/Pi_k); prior support must lie within w.
[[nodiscard]] double cross_entropy(const PriorOnLevels& prior, const AdaptiveWeights& w);

/// Compensated (Neumaier) sum.
[[nodiscard]] double neumaier_sum(std::span<const double> values);

}  // namespace monotest
