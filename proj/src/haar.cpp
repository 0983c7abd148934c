#include "monotest/haar.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "monotest/random.hpp"
#include "monotest/simd_kernels.hpp"

namespace monotest {
namespace {

constexpr int kMaxFieldLevel = 40;

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

std::size_t level_offset(int k) { return (std::size_t{1} << (k - 1)) - 1; }

}  // namespace

double DyadicIndex::bandwidth() const { return std::ldexp(1.0, -level); }

double DyadicIndex::center() const { return (2.0 * static_cast<double>(position) + 1.0) * bandwidth(); }

bool DyadicIndex::admissible() const noexcept {
  return level >= 1 && level <= 63 && position < (std::uint64_t{1} << (level - 1));
}

std::uint64_t grid_size(int level) {
  if (level < 1 || level > 64) throw std::domain_error("grid_size: level must be in [1, 64]");
  return std::uint64_t{1} << (level - 1);
}

double level_sigma(double sigma, int level) { return sigma * std::sqrt(2.0 * std::ldexp(1.0, level)); }

SampledSignal SampledSignal::from_values(std::vector<double> values, double noise_sigma) {
  if (values.size() < 2 || !std::has_single_bit(values.size())) {
    throw std::invalid_argument("signal length must be a power of two >= 2, got " + std::to_string(values.size()));
  }
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  return SampledSignal{std::move(values), noise_sigma};
}

int SampledSignal::resolution_exponent() const { return std::countr_zero(values.size()); }

double SampledSignal::continuum_sigma() const {
  return noise_sigma / std::sqrt(static_cast<double>(values.size()));
}

SampledSignal sample_function(const std::function<double(double)>& f, int resolution_exponent, double noise_sigma,
                              std::uint64_t seed) {
  if (resolution_exponent < 1 || resolution_exponent > 30) {
    throw std::domain_error("sample_function: resolution exponent must be in [1, 30]");
  }
  const std::size_t n = std::size_t{1} << resolution_exponent;
  std::vector<double> values(n);
  Engine eng = make_engine(seed, 0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    values[i] = f(u);
    if (noise_sigma > 0.0) values[i] += noise_sigma * noise(eng);
  }
  return SampledSignal::from_values(std::move(values), noise_sigma);
}

int default_max_level(int resolution_exponent) { return resolution_exponent > 3 ? resolution_exponent - 2 : 1; }

CoefficientField::CoefficientField(int max_level, double sigma) {
  if (max_level < 1 || max_level > kMaxFieldLevel) {
    throw std::domain_error("CoefficientField: max level must be in [1, " + std::to_string(kMaxFieldLevel) + "]");
  }
  if (!(sigma >= 0.0)) throw std::invalid_argument("CoefficientField: sigma must be >= 0");
  max_level_ = max_level;
  values_.assign(level_offset(max_level + 1), 0.0);
  sigma_h_.resize(static_cast<std::size_t>(max_level));
  for (int k = 1; k <= max_level; ++k) sigma_h_[static_cast<std::size_t>(k - 1)] = level_sigma(sigma, k);
}

CoefficientField CoefficientField::with_level_scales(int max_level, std::vector<double> sigma_h) {
  if (sigma_h.size() != static_cast<std::size_t>(max_level)) {
    throw std::invalid_argument("CoefficientField: need one sigma_h per level");
  }
  CoefficientField field(max_level, 0.0);
  for (double s : sigma_h) {
    if (!(s >= 0.0)) throw std::invalid_argument("CoefficientField: sigma_h must be >= 0");
  }
  field.sigma_h_ = std::move(sigma_h);
  return field;
}

void CoefficientField::check_level(int k) const {
  if (k < 1 || k > max_level_) {
    throw std::out_of_range("level " + std::to_string(k) + " not present (max level " + std::to_string(max_level_) +
                            ")");
  }
}

std::span<const double> CoefficientField::level(int k) const {
  check_level(k);
  return std::span<const double>(values_).subspan(level_offset(k), grid_size(k));
}

std::span<double> CoefficientField::level(int k) {
  check_level(k);
  return std::span<double>(values_).subspan(level_offset(k), grid_size(k));
}

double CoefficientField::sigma_h(int k) const {
  check_level(k);
  return sigma_h_[static_cast<std::size_t>(k - 1)];
}

double CoefficientField::at(const DyadicIndex& idx) const {
  if (!idx.admissible()) throw std::domain_error("non-admissible dyadic index");
  return level(idx.level)[idx.position];
}

double& CoefficientField::at(const DyadicIndex& idx) {
  if (!idx.admissible()) throw std::domain_error("non-admissible dyadic index");
  return level(idx.level)[idx.position];
}

double theta_functional(const std::function<double(double)>& f, const DyadicIndex& idx, double abs_tol) {
  if (!idx.admissible()) {
    throw std::domain_error("theta_functional: index (level " + std::to_string(idx.level) + ", position " +
                            std::to_string(idx.position) + ") is not admissible");
  }
  const double h = idx.bandwidth();
  const double t = idx.center();
  // |theta error| <= (err_left + err_right) / h
  const double tol = 0.5 * abs_tol * h;
  const double right = integrate(f, t, t + h, tol);
  const double left = integrate(f, t - h, t, tol);
  return (right - left) / h;
}

CoefficientField theta_field(const std::function<double(double)>& f, int max_level, double sigma, double abs_tol) {
  CoefficientField field(max_level, sigma);
  for (int k = 1; k <= max_level; ++k) {
    auto row = field.level(k);
    for (std::uint64_t j = 0; j < row.size(); ++j) row[j] = theta_functional(f, DyadicIndex{k, j}, abs_tol);
  }
  return field;
}

CoefficientField simulate_observation(const CoefficientField& truth, std::uint64_t seed) {
  CoefficientField out = truth;
  for (int k = 1; k <= truth.max_level(); ++k) {
    const double s = truth.sigma_h(k);
    if (s == 0.0) continue;
    Engine eng = make_engine(seed, static_cast<std::uint64_t>(k));
    std::normal_distribution<double> xi(0.0, 1.0);
    for (double& v : out.level(k)) v += s * xi(eng);
  }
  return out;
}

CoefficientField haar_estimates(const SampledSignal& y, int max_level) {
  const int J = y.resolution_exponent();
  if (max_level < 1 || max_level > J) {
    throw std::domain_error("haar_estimates: max level " + std::to_string(max_level) + " outside [1, " +
                            std::to_string(J) + "]");
  }
  std::vector<double> sigma_h(static_cast<std::size_t>(max_level));
  for (int k = 1; k <= max_level; ++k) {
    // half-window of 2^(J-k) samples: sigma_h = s * sqrt(2 / (N h))
    sigma_h[static_cast<std::size_t>(k - 1)] = y.noise_sigma * std::sqrt(2.0 / std::ldexp(1.0, J - k));
  }
  CoefficientField field = CoefficientField::with_level_scales(max_level, std::move(sigma_h));

  const auto& kern = simd::kernels();
  std::vector<double> sums = y.values;
  std::vector<double> next(sums.size() / 2);
  std::vector<double> diffs(sums.size() / 2);
  // After step m the sums cover blocks of 2^(m+1) samples and the diffs are
  // right-minus-left totals over half-windows of 2^m samples, i.e. level J - m.
  for (int m = 0; m < J; ++m) {
    const std::size_t pairs = sums.size() / 2;
    kern.pair_sum_diff(sums.data(), next.data(), diffs.data(), pairs);
    const int k = J - m;
    if (k <= max_level) {
      const double inv_width = std::ldexp(1.0, -m);
      auto row = field.level(k);
      for (std::size_t j = 0; j < pairs; ++j) row[j] = diffs[j] * inv_width;
    }
    sums.assign(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(pairs));
  }
  return field;
}

}  // namespace monotest
