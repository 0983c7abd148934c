#include "monotest/priors.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace monotest {

PriorOnLevels PriorOnLevels::from_weights(std::vector<double> weights, double discarded_mass) {
  if (weights.empty()) throw std::invalid_argument("prior needs at least one level");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("prior weights must be finite and >= 0");
  }
  const double total = neumaier_sum(weights);
  if (!(total > 0.0)) throw std::invalid_argument("prior weights sum to zero");
  PriorOnLevels p;
  p.weights = std::move(weights);
  for (double& w : p.weights) w /= total;
  for (double w : p.weights) {
    if (w > 0.0) p.entropy -= w * std::log(w);
  }
  p.discarded_mass = discarded_mass;
  return p;
}

PriorOnLevels PriorOnLevels::uniform(int n) {
  if (n < 1) throw std::invalid_argument("uniform prior needs n >= 1");
  return from_weights(std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

double PriorOnLevels::weight(int k) const noexcept {
  if (k < 1 || k > max_level()) return 0.0;
  return weights[static_cast<std::size_t>(k - 1)];
}

double PriorOnLevels::log_entropy() const { return std::log(entropy); }

PriorOnLevels PriorOnLevels::truncated(int max_level) const {
  if (max_level >= this->max_level()) return *this;
  if (max_level < 1) throw std::invalid_argument("truncation level must be >= 1");
  std::vector<double> kept(weights.begin(), weights.begin() + max_level);
  const double kept_mass = neumaier_sum(kept);
  if (!(kept_mass > 0.0)) throw PriorTruncationError("prior has no mass on levels 1.." + std::to_string(max_level));
  const double discarded = discarded_mass + (1.0 - discarded_mass) * (1.0 - kept_mass);
  return from_weights(std::move(kept), discarded);
}

Density uniform_density() {
  return Density{"uniform", [](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; }, 1.0};
}

Density exponential_density(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential density needs rate > 0");
  return Density{"exponential", [rate](double x) { return x >= 0.0 ? rate * std::exp(-rate * x) : 0.0; },
                 std::numeric_limits<double>::infinity()};
}

Density density_by_name(const std::string& name) {
  if (name == "uniform") return uniform_density();
  if (name == "exponential") return exponential_density();
  throw std::invalid_argument("unknown density '" + name + "' (expected uniform or exponential)");
}

PriorOnLevels omega_nu_prior(double omega, const Density& nu, int k_max, double max_discarded) {
  if (!(omega > 1.0)) throw std::domain_error("omega_nu_prior: omega must exceed 1");
  if (k_max < 1) throw std::domain_error("omega_nu_prior: k_max must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) w[static_cast<std::size_t>(k - 1)] = nu.pdf(static_cast<double>(k) / omega);
  const double kept = neumaier_sum(w);

  // mass of nu(k / omega) for k > k_max
  double tail = 0.0, c = 0.0;
  const double last = std::isfinite(nu.support_max) ? std::floor(omega * nu.support_max) : 1e300;
  constexpr long long kMaxTailTerms = 100'000'000;
  for (long long k = k_max + 1LL; static_cast<double>(k) <= last && k - k_max <= kMaxTailTerms; ++k) {
    const double term = nu.pdf(static_cast<double>(k) / omega);
    const double t = tail + term;
    c += std::abs(tail) >= std::abs(term) ? (tail - t) + term : (term - t) + tail;
    tail = t;
    if (!std::isfinite(nu.support_max) && static_cast<double>(k) > 10.0 * omega &&
        term <= 1e-18 * (kept + tail)) {
      break;
    }
  }
  tail += c;
  const double discarded = tail / (kept + tail);
  if (discarded > max_discarded) {
    throw PriorTruncationError("omega_nu_prior: k_max = " + std::to_string(k_max) + " discards prior mass " +
                               std::to_string(discarded) + " > " + std::to_string(max_discarded) +
                               "; raise k_max");
  }
  return PriorOnLevels::from_weights(std::move(w), discarded);
}

double uncertainty_condition_diagnostic(const PriorOnLevels& prior) {
  if (!(prior.entropy > 1.0)) {
    throw std::domain_error("uncertainty_condition_diagnostic: entropy " + std::to_string(prior.entropy) +
                            " <= 1, log H is not positive");
  }
  double s = 0.0;
  for (double w : prior.weights) {
    if (w > 0.0) s += w * std::abs(prior.entropy + std::log(w));
  }
  return s / std::log(prior.entropy);
}

double iterated_log(int m, double x) {
  if (m < 0) throw std::domain_error("iterated_log: m must be >= 0");
  if (!(x >= 1.0)) throw std::domain_error("iterated_log: x must be >= 1");
  double v = x;
  for (int l = 0; l <= m; ++l) v = 1.0 + std::log(v);
  return v;
}

double log_star(double x) {
  if (!(x > 1.0)) throw std::domain_error("log_star: x must exceed 1");
  return std::log(std::log(x));
}

double AdaptiveWeights::log_pi(int k) const {
  if (k < 1 || k > k_max()) throw std::out_of_range("adaptive weight level out of range");
  return std::log(eps) - L[static_cast<std::size_t>(k - 1)];
}

double AdaptiveWeights::tail_mass() const {
  return std::pow(iterated_log(m, static_cast<double>(k_max()) + 1.0), -eps);
}

AdaptiveWeights adaptive_weights(int m, double eps, int k_max) {
  if (m < 0) throw std::domain_error("adaptive_weights: m must be >= 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("adaptive_weights: eps must lie in (0, 1)");
  if (k_max < 1) throw std::domain_error("adaptive_weights: k_max must be >= 1");
  AdaptiveWeights w;
  w.m = m;
  w.eps = eps;
  const auto n = static_cast<std::size_t>(k_max);
  w.L.resize(n);
  w.L_tilde.resize(n);
  w.delta.resize(n);
  w.psi.resize(n);
  w.pi.resize(n);
  const double log_eps = std::log(eps);
  for (int k = 1; k <= k_max; ++k) {
    const double x = static_cast<double>(k);
    double psi = 1.0 + std::log(x);  // psi_0(k)
    double d = std::log1p(1.0 / x);  // psi_0(k+1) - psi_0(k)
    double sum_log_psi = 0.0;        // sum_{s<l} log psi_s(k)
    for (int l = 1; l <= m; ++l) {
      sum_log_psi += std::log(psi);
      d = std::log1p(d / psi);
      psi = 1.0 + std::log(psi);
    }
    const double log_psi = std::log(psi);
    const double step = std::log1p(d / psi);  // log psi_m(k+1) - log psi_m(k)
    // psi(k)^-eps - psi(k+1)^-eps = psi(k)^-eps * (1 - exp(-eps * step))
    const double L = eps * log_psi - std::log(-std::expm1(-eps * step)) + log_eps;
    const auto i = static_cast<std::size_t>(k - 1);
    w.L[i] = L;
    w.L_tilde[i] = std::log(x) + sum_log_psi + (1.0 + eps) * log_psi;
    w.delta[i] = w.L_tilde[i] - L;
    w.psi[i] = psi;
    w.pi[i] = std::exp(log_eps - L);
  }
  return w;
}

double adaptive_entropy(const AdaptiveWeights& w) {
  std::vector<double> terms(w.pi.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = w.pi[i] * (w.L[i] - std::log(w.eps));
  return neumaier_sum(terms);
}

double cross_entropy(const PriorOnLevels& prior, const AdaptiveWeights& w) {
  if (prior.max_level() > w.k_max()) throw std::domain_error("cross_entropy: prior support exceeds adaptive weights");
  double s = 0.0;
  for (int k = 1; k <= prior.max_level(); ++k) {
    const double p = prior.weight(k);
    if (p > 0.0) s -= p * w.log_pi(k);
  }
  return s;
}

double neumaier_sum(std::span<const double> values) {
  double s = 0.0, c = 0.0;
  for (double v : values) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + c;
}

}  // namespace monotest
