#pragma once

// Simulators for the null-distribution objects of the single- and
// multi-level tests.
//
// Under theta = 0 each standardized estimate satisfies Phi(xi) ~ U(0,1), so a
// null score is S(xi) = 1/U - 1 exactly in distribution. Uniform order
// statistics follow the Pyke representation U_(k) = E_k / E_{n+1}, where E_k
// is the running sum of i.i.d. standard exponentials. The level average
// B = mean S(xi) therefore equals (E_{n+1}/n) sum_{k<=n} 1/E_k - 1, and its
// centered limit is the totally skewed 1-stable law
//   zeta = zeta_circ + 2 gamma - 1,  zeta_circ = sum_k (1/E_k - 1/k).

#include <complex>
#include <cstdint>
#include <vector>

#include "monotest/gauss.hpp"
#include "monotest/random.hpp"

namespace monotest {

/// 1-stable law with characteristic function
/// exp(i mu t - |c t| - i (2 beta |c| / pi) t log|t|).
struct StableParams {
  double mu = 0.0;
  double c = kPi / 2.0;
  double beta = 1.0;

  /// mu = 0, c = pi/2, beta = 1: the limit of B_h - log n_h + gamma.
  static StableParams level_average_limit() { return StableParams{}; }
};

[[nodiscard]] std::complex<double> stable_cf(const StableParams& params, double t);

/// Controls the running-sum walk E_1, E_2, ... used for zeta_circ and for
/// large-n level averages. The first `exact_terms` increments are drawn one
/// by one; beyond that the walk advances in blocks of ~(growth - 1) k steps
/// with one Gamma(L) draw per block, and the block's reciprocal sum is
/// integrated along the linear bridge. For exact_terms >= 256 and
/// growth <= 1.05 the induced bias is below 1e-4 (mean) and the
/// distributional error is invisible at 10^6 replications.
struct WalkOptions {
  std::uint64_t exact_terms = 256;
  double block_growth = 1.05;
};

/// Result of one walk to index n.
struct WalkDraw {
  double sum_inverse = 0.0;    // sum_{k<=n} 1/E_k
  double first = 0.0;          // E_1
  double last = 0.0;           // E_n
  double checkpoint_sum = 0.0; // sum_{k<=checkpoint} 1/E_k (when requested)
};

/// Draws one walk to index n >= 1. `checkpoint` (0 = none) must be <= n.
[[nodiscard]] WalkDraw draw_gamma_walk(std::uint64_t n, std::uint64_t checkpoint, const WalkOptions& opts,
                                       Engine& eng, std::vector<double>& scratch);

/// Harmonic number H_n (exact summation up to 10^5 terms, asymptotic beyond).
[[nodiscard]] double harmonic_number(std::uint64_t n);

/// reps draws of B_h = (1/n_h) sum S(xi_k) under the null, via S = 1/U - 1.
[[nodiscard]] std::vector<double> simulate_B_null(std::uint64_t n_h, std::size_t reps, std::uint64_t seed);

/// reps draws of sum_{k<=K} (1/E_k - 1/k). Exact term by term when
/// K <= opts.exact_terms. Throws std::domain_error for K < 10.
[[nodiscard]] std::vector<double> simulate_zeta_circ(std::uint64_t truncation, std::size_t reps, std::uint64_t seed,
                                                     const WalkOptions& opts = {});

/// Same draws together with the partial sums at `checkpoint` from the same
/// walks, for truncation self-convergence diagnostics.
struct ZetaCircDraws {
  std::vector<double> at_truncation;
  std::vector<double> at_checkpoint;
  std::uint64_t truncation = 0;
  std::uint64_t checkpoint = 0;
};
[[nodiscard]] ZetaCircDraws simulate_zeta_circ_with_checkpoint(std::uint64_t truncation, std::uint64_t checkpoint,
                                                               std::size_t reps, std::uint64_t seed,
                                                               const WalkOptions& opts = {});

/// reps draws of the limit variable zeta = zeta_circ + 2 gamma - 1.
[[nodiscard]] std::vector<double> simulate_zeta(std::uint64_t truncation, std::size_t reps, std::uint64_t seed,
                                                const WalkOptions& opts = {});

/// Uniform order statistics of size n via E_k / E_{n+1} (nondecreasing, in (0,1)).
[[nodiscard]] std::vector<double> pyke_order_statistics(std::uint64_t n, std::uint64_t seed);

/// q_alpha^kappa = -log(log(1/(1 - alpha))), the upper alpha-quantile of
/// log(1/kappa) for standard exponential kappa. Throws outside (0, 1).
[[nodiscard]] double exp_sup_quantile(double alpha);

/// Exact upper alpha-quantile of max_t S(xi_t) / n over n null entries:
/// (1 / (1 - (1 - alpha)^(1/n)) - 1) / n.
[[nodiscard]] double map_single_exact_quantile(std::uint64_t n, double alpha);

/// log max_t S(xi_t) over n null entries, exact in distribution and O(1):
/// the minimum of n uniforms is 1 - V^(1/n).
[[nodiscard]] double draw_null_log_max_score(std::uint64_t n, Engine& eng);

/// Joint null summary of one level with n entries.
struct NullLevelDraw {
  double log_max_score = 0.0;  // log max_t S
  double score_sum = 0.0;      // sum_t S
};

/// Draws (max, sum) of null scores over n entries. Uses explicit uniforms up
/// to `direct_limit` entries and the Pyke walk beyond, so n may be as large
/// as 2^63. Holds scratch space: use one instance per worker thread.
class NullLevelSampler {
 public:
  explicit NullLevelSampler(WalkOptions walk = {}, std::uint64_t direct_limit = 4096)
      : walk_(walk), direct_limit_(direct_limit) {}

  [[nodiscard]] NullLevelDraw draw(std::uint64_t n, Engine& eng);

 private:
  WalkOptions walk_;
  std::uint64_t direct_limit_;
  std::vector<double> scratch_;
};

}  // namespace monotest
