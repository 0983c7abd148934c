#pragma once

// Local-average functionals over the dyadic bandwidth/grid system.
//
// At level k the bandwidth is h = 2^-k and the grid is t = (2j+1)h,
// j = 0..n_h-1 with n_h = 2^(k-1). theta_{h,t}(f) is the mean of f over
// [t, t+h) minus the mean over [t-h, t); it is nonnegative for every index
// whenever f is nondecreasing.
//
// Discretization: the continuous white-noise model is realized by N = 2^J
// samples at bin midpoints, each carrying independent N(0, s^2) noise with
// s = sigma * sqrt(N). Bin averages over half-windows of N*h samples then
// reproduce sigma_h = sigma * sqrt(2/h) exactly, so for a sampled signal
// with per-sample standard deviation s the level scale is
// sigma_h = s * sqrt(2 / (N h)).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace monotest {

/// (level, position) pair identifying h = 2^-level and t = (2*position+1) h.
struct DyadicIndex {
  int level = 1;
  std::uint64_t position = 0;

  [[nodiscard]] double bandwidth() const;
  [[nodiscard]] double center() const;
  /// True when level >= 1 and position < n_h, i.e. [t-h, t+h] lies in [0, 1].
  [[nodiscard]] bool admissible() const noexcept;

  friend bool operator==(const DyadicIndex&, const DyadicIndex&) = default;
};

/// n_h = 2^(level-1): number of grid points at a level.
[[nodiscard]] std::uint64_t grid_size(int level);

/// sigma_h = sigma * sqrt(2 / h) for continuum noise level sigma.
[[nodiscard]] double level_sigma(double sigma, int level);

/// Uniformly sampled signal on [0, 1]: values at the N = 2^J bin midpoints.
struct SampledSignal {
  std::vector<double> values;
  /// Standard deviation of the noise on each sample (not the continuum sigma).
  double noise_sigma = 0.0;

  /// Validates that the length is a power of two >= 2 and sigma >= 0.
  static SampledSignal from_values(std::vector<double> values, double noise_sigma);

  [[nodiscard]] int resolution_exponent() const;  // J
  /// Continuum sigma = noise_sigma / sqrt(N).
  [[nodiscard]] double continuum_sigma() const;
};

/// Samples f at bin midpoints and adds N(0, noise_sigma^2) noise.
[[nodiscard]] SampledSignal sample_function(const std::function<double(double)>& f, int resolution_exponent,
                                            double noise_sigma, std::uint64_t seed);

/// Default deepest level for a signal of 2^J samples: J - 2, so that each
/// half-window averages at least four samples.
[[nodiscard]] int default_max_level(int resolution_exponent);

/// Values theta_{h,t} (true or estimated) for levels 1..max_level, stored
/// level-major, together with the noise scale sigma_h of each level.
class CoefficientField {
 public:
  CoefficientField() = default;

  /// Zero field with sigma_h = level_sigma(sigma, k).
  CoefficientField(int max_level, double sigma);

  /// Zero field with explicit per-level scales (index 0 is level 1).
  static CoefficientField with_level_scales(int max_level, std::vector<double> sigma_h);

  [[nodiscard]] int max_level() const noexcept { return max_level_; }
  [[nodiscard]] std::span<const double> level(int k) const;
  [[nodiscard]] std::span<double> level(int k);
  [[nodiscard]] double sigma_h(int k) const;
  [[nodiscard]] double at(const DyadicIndex& idx) const;
  double& at(const DyadicIndex& idx);
  [[nodiscard]] std::size_t total_entries() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> all_values() const noexcept { return values_; }

  friend bool operator==(const CoefficientField&, const CoefficientField&) = default;

 private:
  void check_level(int k) const;

  int max_level_ = 0;
  std::vector<double> values_;
  std::vector<double> sigma_h_;
};

/// theta_{h,t}(f) by adaptive Simpson quadrature (absolute tolerance on the
/// result). Throws std::domain_error for a non-admissible index.
[[nodiscard]] double theta_functional(const std::function<double(double)>& f, const DyadicIndex& idx,
                                      double abs_tol = 1e-10);

/// Truth field theta_{h,t}(f) at every index up to max_level.
[[nodiscard]] CoefficientField theta_field(const std::function<double(double)>& f, int max_level, double sigma,
                                           double abs_tol = 1e-10);

/// theta_hat = theta + sigma_h * xi with xi i.i.d. standard normal over all
/// (h, t). Level k draws from stream k of the seed.
[[nodiscard]] CoefficientField simulate_observation(const CoefficientField& truth, std::uint64_t seed);

/// All theta_hat_{h,t} for levels 1..max_level from one bottom-up pairwise
/// pass over the samples (O(N)). Throws std::domain_error if max_level > J.
[[nodiscard]] CoefficientField haar_estimates(const SampledSignal& y, int max_level);

}  // namespace monotest
