#include "monotest/null_dists.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "monotest/parallel.hpp"
#include "monotest/simd_kernels.hpp"

namespace monotest {
namespace {

// Blocks shorter than this are walked increment by increment.
constexpr std::uint64_t kMinBlock = 8;

std::size_t chunk_for(std::uint64_t work_per_rep) {
  const std::uint64_t target = std::uint64_t{1} << 20;
  return static_cast<std::size_t>(std::clamp<std::uint64_t>(target / std::max<std::uint64_t>(work_per_rep, 1), 1, 4096));
}

}  // namespace

std::complex<double> stable_cf(const StableParams& p, double t) {
  if (t == 0.0) return {1.0, 0.0};
  const double abs_c = std::abs(p.c);
  const double re = -std::abs(p.c * t);
  const double im = p.mu * t - (2.0 * p.beta * abs_c / kPi) * t * std::log(std::abs(t));
  return std::exp(std::complex<double>(re, im));
}

WalkDraw draw_gamma_walk(std::uint64_t n, std::uint64_t checkpoint, const WalkOptions& opts, Engine& eng,
                         std::vector<double>& scratch) {
  if (n == 0) throw std::domain_error("draw_gamma_walk: n must be >= 1");
  if (checkpoint > n) throw std::domain_error("draw_gamma_walk: checkpoint beyond walk length");
  const auto& kern = simd::kernels();

  WalkDraw out;
  const std::uint64_t m = std::min<std::uint64_t>(n, std::max<std::uint64_t>(opts.exact_terms, 1));
  scratch.resize(m);
  double e = 0.0;
  for (std::uint64_t i = 0; i < m; ++i) {
    e += standard_exponential(eng);
    scratch[i] = e;
  }
  if (checkpoint > 0 && checkpoint <= m) {
    out.checkpoint_sum = kern.sum_inverse(scratch.data(), checkpoint);
    out.sum_inverse = out.checkpoint_sum + kern.sum_inverse(scratch.data() + checkpoint, m - checkpoint);
  } else {
    out.sum_inverse = kern.sum_inverse(scratch.data(), m);
  }
  out.first = scratch[0];

  const double growth = std::max(opts.block_growth, 1.0);
  std::uint64_t k = m;
  while (k < n) {
    auto len = static_cast<std::uint64_t>(static_cast<double>(k) * (growth - 1.0));
    len = std::clamp<std::uint64_t>(len, 1, n - k);
    if (checkpoint > k && checkpoint < k + len) len = checkpoint - k;

    if (len < kMinBlock) {
      for (std::uint64_t i = 0; i < len; ++i) {
        e += standard_exponential(eng);
        out.sum_inverse += 1.0 / e;
      }
    } else {
      const double L = static_cast<double>(len);
      std::gamma_distribution<double> block(L, 1.0);
      const double g = block(eng);
      // sum_{i=1..L} 1/(e + i g/L) by the midpoint rule along the bridge
      out.sum_inverse += (L / g) * std::log1p(g / (e + 0.5 * g / L));
      e += g;
    }
    k += len;
    if (k == checkpoint) out.checkpoint_sum = out.sum_inverse;
  }
  out.last = e;
  return out;
}

double harmonic_number(std::uint64_t n) {
  if (n <= 100000) {
    double h = 0.0;
    for (std::uint64_t k = n; k >= 1; --k) h += 1.0 / static_cast<double>(k);
    return h;
  }
  const double x = static_cast<double>(n);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + kEulerGamma + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0;
}

std::vector<double> simulate_B_null(std::uint64_t n_h, std::size_t reps, std::uint64_t seed) {
  if (n_h == 0) throw std::domain_error("simulate_B_null: n_h must be >= 1");
  std::vector<double> out(reps);
  const double inv_n = 1.0 / static_cast<double>(n_h);
  for_each_chunk(reps, chunk_for(n_h), [&](std::uint64_t chunk, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, chunk);
    std::vector<double> u(n_h);
    const auto& kern = simd::kernels();
    for (std::size_t r = begin; r < end; ++r) {
      for (double& x : u) x = open_uniform(eng);
      out[r] = kern.sum_inverse_minus_one(u.data(), u.size()) * inv_n;
    }
  });
  return out;
}

ZetaCircDraws simulate_zeta_circ_with_checkpoint(std::uint64_t truncation, std::uint64_t checkpoint, std::size_t reps,
                                                 std::uint64_t seed, const WalkOptions& opts) {
  if (truncation < 10) throw std::domain_error("simulate_zeta_circ: truncation K must be >= 10");
  if (checkpoint > truncation) throw std::domain_error("simulate_zeta_circ: checkpoint beyond truncation");

  ZetaCircDraws out;
  out.truncation = truncation;
  out.checkpoint = checkpoint;
  out.at_truncation.resize(reps);
  if (checkpoint > 0) out.at_checkpoint.resize(reps);

  const double h_trunc = harmonic_number(truncation);
  const double h_check = checkpoint > 0 ? harmonic_number(checkpoint) : 0.0;
  const bool exact = truncation <= opts.exact_terms;
  const std::uint64_t work = std::min<std::uint64_t>(truncation, opts.exact_terms) + 64;

  for_each_chunk(reps, chunk_for(work), [&](std::uint64_t chunk, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, chunk);
    std::vector<double> scratch;
    const auto& kern = simd::kernels();
    for (std::size_t r = begin; r < end; ++r) {
      if (exact) {
        scratch.resize(truncation);
        double e = 0.0;
        for (double& x : scratch) {
          e += standard_exponential(eng);
          x = e;
        }
        out.at_truncation[r] = kern.sum_inverse_gap(scratch.data(), truncation, 1);
        if (checkpoint > 0) out.at_checkpoint[r] = kern.sum_inverse_gap(scratch.data(), checkpoint, 1);
      } else {
        const WalkDraw w = draw_gamma_walk(truncation, checkpoint, opts, eng, scratch);
        out.at_truncation[r] = w.sum_inverse - h_trunc;
        if (checkpoint > 0) out.at_checkpoint[r] = w.checkpoint_sum - h_check;
      }
    }
  });
  return out;
}

std::vector<double> simulate_zeta_circ(std::uint64_t truncation, std::size_t reps, std::uint64_t seed,
                                       const WalkOptions& opts) {
  return simulate_zeta_circ_with_checkpoint(truncation, 0, reps, seed, opts).at_truncation;
}

std::vector<double> simulate_zeta(std::uint64_t truncation, std::size_t reps, std::uint64_t seed,
                                  const WalkOptions& opts) {
  std::vector<double> z = simulate_zeta_circ(truncation, reps, seed, opts);
  for (double& v : z) v += 2.0 * kEulerGamma - 1.0;
  return z;
}

std::vector<double> pyke_order_statistics(std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw std::domain_error("pyke_order_statistics: n must be >= 1");
  Engine eng = make_engine(seed, 0);
  std::vector<double> cum(n);
  double e = 0.0;
  for (double& x : cum) {
    e += standard_exponential(eng);
    x = e;
  }
  const double total = e + standard_exponential(eng);
  for (double& x : cum) x /= total;
  return cum;
}

double exp_sup_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("exp_sup_quantile: alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  return -std::log(-std::log1p(-alpha));
}

double map_single_exact_quantile(std::uint64_t n, double alpha) {
  if (n == 0) throw std::domain_error("map_single_exact_quantile: n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("map_single_exact_quantile: alpha must lie in (0, 1)");
  const double nn = static_cast<double>(n);
  const double p = -std::expm1(std::log1p(-alpha) / nn);  // P{U_(1) < 1/(1 + n y)}
  return (1.0 / p - 1.0) / nn;
}

double draw_null_log_max_score(std::uint64_t n, Engine& eng) {
  const double v = open_uniform(eng);
  const double u_min = -std::expm1(std::log(v) / static_cast<double>(n));
  return std::log1p(-u_min) - std::log(u_min);
}

NullLevelDraw NullLevelSampler::draw(std::uint64_t n, Engine& eng) {
  if (n == 0) throw std::domain_error("NullLevelSampler: n must be >= 1");
  NullLevelDraw out;
  if (n <= direct_limit_) {
    scratch_.resize(n);
    for (double& x : scratch_) x = open_uniform(eng);
    const auto& kern = simd::kernels();
    out.score_sum = kern.sum_inverse_minus_one(scratch_.data(), n);
    const double u_min = kern.min_value(scratch_.data(), n);
    out.log_max_score = std::log1p(-u_min) - std::log(u_min);
    return out;
  }
  const WalkDraw w = draw_gamma_walk(n, 0, walk_, eng, scratch_);
  const double total = w.last + standard_exponential(eng);  // E_{n+1}
  out.score_sum = total * w.sum_inverse - static_cast<double>(n);
  out.log_max_score = std::log(total - w.first) - std::log(w.first);
  return out;
}

}  // namespace monotest
