#include "monotest/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

#include "monotest/format.hpp"
#include "monotest/gauss.hpp"
#include "monotest/null_dists.hpp"
#include "monotest/parallel.hpp"
#include "monotest/random.hpp"
#include "monotest/simd_kernels.hpp"
#include "monotest/stats.hpp"

#ifndef MONOTEST_VERSION
#define MONOTEST_VERSION "unknown"
#endif

namespace monotest {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr int kSummaryMaxLevel = 63;
constexpr int kFieldMaxLevel = 20;

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double saturating_exp(double x) {
  return x >= std::log(std::numeric_limits<double>::max()) ? std::numeric_limits<double>::max() : std::exp(x);
}

bool has_test(const SweepSpec& spec, SweepTest t) {
  return std::find(spec.tests.begin(), spec.tests.end(), t) != spec.tests.end();
}

int draw_level(const std::vector<double>& cdf, Engine& eng) {
  const double u = open_uniform(eng);
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1)) + 1;
}

std::vector<double> prior_cdf(const PriorOnLevels& p) {
  std::vector<double> cdf(p.weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = acc += p.weights[i];
  cdf.back() = 1.0;
  return cdf;
}

double critical_value_for(const SweepSpec& spec, SweepTest t) {
  return t == SweepTest::bayes ? spec.zeta_critical : exp_sup_quantile(spec.alpha);
}

SweepResult tally(const SweepSpec& spec, double offset, const std::vector<std::vector<double>>& stats) {
  SweepResult r;
  r.offset = offset;
  r.reps = stats.empty() ? 0 : stats.front().size();
  for (std::size_t i = 0; i < spec.tests.size(); ++i) {
    const double crit = critical_value_for(spec, spec.tests[i]);
    std::size_t n = 0;
    for (double s : stats[i]) n += decide(s, crit) == Decision::reject_H0 ? 1 : 0;
    r.rejections.push_back(n);
  }
  return r;
}

std::vector<std::vector<double>> summary_statistics(const SweepSpec& spec, double offset, std::size_t reps,
                                                    std::uint64_t seed) {
  const int L = spec.levels;
  if (L < 1 || L > kSummaryMaxLevel) throw std::domain_error("sweep: level-summary engine supports 1..63 levels");
  const bool need_sum = has_test(spec, SweepTest::bayes);
  const bool need_adaptive = has_test(spec, SweepTest::adaptive);
  if (need_adaptive && spec.adaptive.k_max() < L) throw std::domain_error("sweep: adaptive weights too short");

  const std::vector<double> cdf = prior_cdf(spec.prior);
  std::vector<double> amp(static_cast<std::size_t>(L) + 1, 0.0);
  for (int k = 1; k <= spec.prior.max_level(); ++k) amp[static_cast<std::size_t>(k)] = planted_amplitude(spec, k, offset);

  std::vector<std::vector<double>> stats(spec.tests.size(), std::vector<double>(reps));
  for_each_chunk(reps, 16, [&](std::uint64_t chunk, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, chunk);
    NullLevelSampler sampler;
    std::normal_distribution<double> xi(0.0, 1.0);
    for (std::size_t r = begin; r < end; ++r) {
      int rho = 0;
      double spike = 0.0;
      if (!spec.null_only) {
        rho = draw_level(cdf, eng);
        spike = score(-amp[static_cast<std::size_t>(rho)] + xi(eng)).log_s;
      }
      double map_stat = -std::numeric_limits<double>::infinity();
      double adaptive_stat = map_stat;
      double bayes_stat = 0.0;
      for (int k = 1; k <= L; ++k) {
        const std::uint64_t n = grid_size(k);
        const double log_n = (k - 1) * kLn2;
        const bool spiked = k == rho;
        const std::uint64_t n_null = n - (spiked ? 1 : 0);
        double log_max = -std::numeric_limits<double>::infinity();
        double log_sum = log_max;
        if (n_null > 0) {
          if (need_sum) {
            const NullLevelDraw d = sampler.draw(n_null, eng);
            log_max = d.log_max_score;
            log_sum = std::log(d.score_sum);
          } else {
            log_max = draw_null_log_max_score(n_null, eng);
          }
        }
        if (spiked) {
          log_max = std::max(log_max, spike);
          log_sum = log_add_exp(log_sum, spike);
        }
        const double zm = log_max - log_n;
        const double w = spec.prior.weight(k);
        if (w > 0.0) {
          map_stat = std::max(map_stat, zm + std::log(w));
          if (need_sum) {
            const double B = saturating_exp(log_sum - log_n);
            bayes_stat += w * (B - log_n - kEulerGamma + 1.0 + std::log(w));
          }
        }
        if (need_adaptive) adaptive_stat = std::max(adaptive_stat, zm + spec.adaptive.log_pi(k));
      }
      for (std::size_t i = 0; i < spec.tests.size(); ++i) {
        switch (spec.tests[i]) {
          case SweepTest::map: stats[i][r] = map_stat; break;
          case SweepTest::bayes: stats[i][r] = bayes_stat; break;
          case SweepTest::adaptive: stats[i][r] = adaptive_stat; break;
        }
      }
    }
  });
  return stats;
}

std::vector<std::vector<double>> field_statistics(const SweepSpec& spec, double offset, std::size_t reps,
                                                  std::uint64_t seed) {
  const int L = spec.levels;
  if (L < 1 || L > kFieldMaxLevel) throw std::domain_error("sweep: field engine supports 1..20 levels");
  const std::vector<double> cdf = prior_cdf(spec.prior);
  std::vector<std::vector<double>> stats(spec.tests.size(), std::vector<double>(reps));
  const CoefficientField zero(L, 1.0);
  const std::size_t chunk = std::max<std::size_t>(1, (std::size_t{1} << 18) >> L);
  for_each_chunk(reps, chunk, [&](std::uint64_t c, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, c);
    for (std::size_t r = begin; r < end; ++r) {
      CoefficientField truth = zero;
      if (!spec.null_only) {
        const int rho = draw_level(cdf, eng);
        std::uniform_int_distribution<std::uint64_t> tau(0, grid_size(rho) - 1);
        const DyadicIndex idx{rho, tau(eng)};
        truth.at(idx) = -planted_amplitude(spec, rho, offset) * truth.sigma_h(rho);
      }
      const CoefficientField obs = simulate_observation(truth, eng());
      for (std::size_t i = 0; i < spec.tests.size(); ++i) {
        switch (spec.tests[i]) {
          case SweepTest::map:
            stats[i][r] = multilevel_map_test(obs, spec.prior, spec.alpha).statistic;
            break;
          case SweepTest::bayes:
            stats[i][r] = multilevel_bayes_test(obs, spec.prior, spec.alpha, spec.zeta_critical).statistic;
            break;
          case SweepTest::adaptive:
            stats[i][r] = adaptive_map_test(obs, spec.adaptive, spec.alpha).statistic;
            break;
        }
      }
    }
  });
  return stats;
}

void write_row(std::ostream& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

}  // namespace

std::string_view version() noexcept { return MONOTEST_VERSION; }

PriorOnLevels prior_from_config(const ExperimentConfig& cfg) {
  if (cfg.prior == "uniform_levels") return PriorOnLevels::uniform(cfg.prior_levels);
  if (cfg.prior == "omega_nu") {
    const Density nu = density_by_name(cfg.nu);
    int k_max = 0;
    if (std::isfinite(nu.support_max)) {
      k_max = static_cast<int>(std::floor(cfg.omega * nu.support_max));
    } else {
      // exponential(1): mass beyond k is about exp(-k / omega)
      k_max = static_cast<int>(std::ceil(25.0 * cfg.omega));
    }
    return omega_nu_prior(cfg.omega, nu, std::max(k_max, 1));
  }
  throw ConfigError("config: unknown prior '" + cfg.prior + "' (expected uniform_levels or omega_nu)");
}

// ---------------------------------------------------------------- figure 1

std::vector<Figure1Row> run_figure1(const std::vector<std::uint64_t>& n_h_list, std::size_t reps, std::uint64_t seed,
                                    const Figure1Options& opts) {
  if (!(opts.x_step > 0.0)) throw std::domain_error("figure1: x_step must be > 0");
  std::vector<Figure1Row> rows;
  const double shift_zeta = 2.0 * kEulerGamma - 1.0;
  const double n = static_cast<double>(reps);
  for (std::size_t i = 0; i < n_h_list.size(); ++i) {
    const std::uint64_t n_h = n_h_list[i];
    std::vector<double> b = simulate_B_null(n_h, reps, derive_seed(seed, 2 * i));
    const double shift_b = kEulerGamma - std::log(static_cast<double>(n_h));
    for (double& v : b) v += shift_b;
    std::vector<double> z = simulate_zeta_circ(opts.zeta_truncation, reps, derive_seed(seed, 2 * i + 1));
    for (double& v : z) v += shift_zeta;
    std::sort(b.begin(), b.end());
    std::sort(z.begin(), z.end());
    const std::size_t need = opts.min_exceedances;
    for (double x = opts.x_min;; x += opts.x_step * std::max(1.0, x)) {
      const std::size_t cb = count_at_least(b, x);
      const std::size_t cz = count_at_least(z, x);
      if (cb < need || cz < need) break;
      // a tail estimate at p = 1 carries no information; wait for both
      // samples to have draws below x as well
      if (reps - cb < need || reps - cz < need) continue;
      Figure1Row row;
      row.n_h = n_h;
      row.x = x;
      row.count_B = cb;
      row.count_zeta = cz;
      const double pb = static_cast<double>(cb) / n;
      const double pz = static_cast<double>(cz) / n;
      row.logtail_B = std::log(pb);
      row.logtail_zeta = std::log(pz);
      row.delta = row.logtail_B - row.logtail_zeta;
      row.se = std::sqrt((1.0 - pb) / static_cast<double>(cb) + (1.0 - pz) / static_cast<double>(cz));
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------- figure 2

std::vector<Figure2Row> run_figure2(const std::vector<int>& m_list, double eps, int k_max) {
  std::vector<Figure2Row> rows;
  for (int m : m_list) {
    const AdaptiveWeights w = adaptive_weights(m, eps, k_max);
    for (int k = 1; k <= k_max; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      rows.push_back({m, k, w.L[i], w.L_tilde[i], w.delta[i], w.delta[i] * w.psi[i]});
    }
  }
  return rows;
}

// ------------------------------------------------------------ power sweeps

std::string_view to_string(SweepTest t) noexcept {
  switch (t) {
    case SweepTest::map: return "map";
    case SweepTest::bayes: return "bayes";
    case SweepTest::adaptive: return "adaptive";
  }
  return "unknown";
}

SweepTest parse_sweep_test(std::string_view name) {
  if (name == "map") return SweepTest::map;
  if (name == "bayes") return SweepTest::bayes;
  if (name == "adaptive") return SweepTest::adaptive;
  throw ConfigError("unknown multi-level test '" + std::string(name) + "' (expected map, bayes or adaptive)");
}

double SweepResult::rate(std::size_t i) const {
  return reps == 0 ? 0.0 : static_cast<double>(rejections.at(i)) / static_cast<double>(reps);
}

double SweepResult::beta_bar(std::size_t i) const { return 1.0 - rate(i); }

double SweepResult::se(std::size_t i) const {
  const double p = rate(i);
  return reps == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

double planted_amplitude(const SweepSpec& spec, int level, double offset) {
  const double q = exp_sup_quantile(spec.alpha);
  const double h = spec.amplitude_kind == SnrKind::R ? spec.prior.entropy : spec.omega;
  const double R = critical_snr(spec.amplitude_kind, grid_size(level), q, h);
  return std::max(0.0, std::sqrt(std::max(R, 0.0)) + offset);
}

std::vector<std::vector<double>> sweep_statistics(const SweepSpec& spec, double offset, std::size_t reps,
                                                  std::uint64_t seed, bool field_engine) {
  return field_engine ? field_statistics(spec, offset, reps, seed) : summary_statistics(spec, offset, reps, seed);
}

SweepResult simulate_sweep_point(const SweepSpec& spec, double offset, std::size_t reps, std::uint64_t seed) {
  return tally(spec, offset, summary_statistics(spec, offset, reps, seed));
}

SweepResult simulate_sweep_point_field(const SweepSpec& spec, double offset, std::size_t reps, std::uint64_t seed) {
  return tally(spec, offset, field_statistics(spec, offset, reps, seed));
}

SweepSpec sweep_spec_from_config(const ExperimentConfig& cfg, CalibrationStore* store) {
  SweepSpec spec;
  const PriorOnLevels full = prior_from_config(cfg);
  spec.levels = cfg.max_level > 0 ? cfg.max_level : std::min(full.max_level(), kSummaryMaxLevel);
  spec.prior = full.truncated(spec.levels);
  spec.alpha = cfg.alpha;
  spec.omega = cfg.omega;
  spec.adaptive = adaptive_weights(cfg.adaptive_m, cfg.adaptive_eps, spec.levels);
  for (const auto& t : cfg.tests) spec.tests.push_back(parse_sweep_test(t));
  if (cfg.amplitude_rule == "R") spec.amplitude_kind = SnrKind::R;
  else if (cfg.amplitude_rule == "R_tilde") spec.amplitude_kind = SnrKind::R_tilde;
  else if (cfg.amplitude_rule == "R_plus") spec.amplitude_kind = SnrKind::R_plus;
  else throw ConfigError("config: unknown amplitude_rule '" + cfg.amplitude_rule + "'");

  if (has_test(spec, SweepTest::bayes)) {
    const std::uint64_t seed = cfg.require_seed();
    constexpr std::uint64_t kZetaReps = 200'000;
    const std::uint64_t zseed = derive_seed(seed, 0x7e7a);
    CalibrationEntry e;
    if (store) {
      const auto hit = store->find(CalibrationKind::zeta_circ, cfg.zeta_truncation, cfg.alpha);
      e = hit ? *hit
              : calibrate_cached(*store, CalibrationKind::zeta_circ, cfg.zeta_truncation, cfg.alpha, kZetaReps, zseed);
    } else {
      e = calibrate(CalibrationKind::zeta_circ, cfg.zeta_truncation, cfg.alpha, kZetaReps, zseed);
    }
    spec.zeta_critical = e.value;
    spec.calibration_used.push_back(e);
  }
  return spec;
}

// ----------------------------------------------------------------- type I

double Type1Result::rate() const { return reps == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(reps); }

double Type1Result::se() const {
  const double p = rate();
  return reps == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

Type1Result multilevel_map_type1(const PriorOnLevels& prior, int levels, double alpha, std::size_t reps,
                                 std::uint64_t seed) {
  SweepSpec spec;
  spec.prior = prior.truncated(levels);
  spec.levels = levels;
  spec.alpha = alpha;
  spec.tests = {SweepTest::map};
  spec.null_only = true;
  const SweepResult r = simulate_sweep_point_field(spec, 0.0, reps, seed);
  return Type1Result{"map", reps, r.rejections[0]};
}

Type1Result single_bayes_rejection_rate(const std::vector<double>& mu, double critical_value, std::size_t reps,
                                        std::uint64_t seed) {
  if (mu.empty()) throw std::invalid_argument("single_bayes_rejection_rate: empty level");
  std::vector<unsigned char> reject(reps, 0);
  const double log_n = std::log(static_cast<double>(mu.size()));
  const double log_crit = critical_value > 0.0 ? std::log(critical_value) : -std::numeric_limits<double>::infinity();
  for_each_chunk(reps, std::max<std::size_t>(1, 65536 / mu.size()), [&](std::uint64_t c, std::size_t b, std::size_t e) {
    Engine eng = make_engine(seed, c);
    std::normal_distribution<double> xi(0.0, 1.0);
    std::vector<double> ls(mu.size());
    for (std::size_t r = b; r < e; ++r) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < mu.size(); ++j) {
        ls[j] = score(mu[j] + xi(eng)).log_s;
        top = std::max(top, ls[j]);
      }
      double acc = 0.0;
      for (double v : ls) acc += std::exp(v - top);
      reject[r] = top + std::log(acc) - log_n >= log_crit ? 1 : 0;
    }
  });
  Type1Result out{"single_bayes", reps, 0};
  for (unsigned char v : reject) out.rejections += v;
  return out;
}

// ------------------------------------------------------------ test pipeline

SampledSignal read_signal(std::istream& in, double noise_sigma) {
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    double v = 0.0;
    const char* first = line.data() + b;
    const char* last = line.data() + e + 1;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last || !std::isfinite(v)) {
      throw ConfigError("signal line " + std::to_string(line_no) + ": not a finite number: '" + line + "'");
    }
    values.push_back(v);
  }
  return SampledSignal::from_values(std::move(values), noise_sigma);
}

SampledSignal signal_from_config(const ExperimentConfig& cfg) {
  if (!cfg.signal_file.empty()) {
    std::ifstream in(cfg.signal_file);
    if (!in) throw ConfigError("cannot read signal file " + cfg.signal_file);
    return read_signal(in, cfg.sigma);
  }
  std::function<double(double)> f;
  if (cfg.generator == "linear") {
    f = [](double u) { return u; };
  } else if (cfg.generator == "constant") {
    f = [](double) { return 0.0; };
  } else if (cfg.generator == "dip") {
    // increasing line with a linear down-segment of the given depth
    const double a = cfg.dip_center - 0.5 * cfg.dip_width;
    const double b = cfg.dip_center + 0.5 * cfg.dip_width;
    const double depth = cfg.dip_depth;
    f = [a, b, depth](double u) {
      if (u < a) return u;
      if (u < b) return a - depth * (u - a) / (b - a);
      return u - (b - a) - depth;
    };
  } else {
    throw ConfigError("config: unknown generator '" + cfg.generator + "' (expected linear, constant or dip)");
  }
  return sample_function(f, cfg.resolution, cfg.sigma, cfg.require_seed());
}

TestReport run_test(const SampledSignal& signal, const ExperimentConfig& cfg, const CalibrationStore& store) {
  const int J = signal.resolution_exponent();
  const int max_level = cfg.max_level > 0 ? cfg.max_level : default_max_level(J);
  const CoefficientField field = haar_estimates(signal, max_level);
  if (cfg.test == "map") return multilevel_map_test(field, prior_from_config(cfg), cfg.alpha);
  if (cfg.test == "bayes") return multilevel_bayes_test(field, prior_from_config(cfg), cfg.alpha, store, cfg.zeta_truncation);
  if (cfg.test == "adaptive") {
    return adaptive_map_test(field, adaptive_weights(cfg.adaptive_m, cfg.adaptive_eps, max_level), cfg.alpha);
  }
  if (cfg.test == "single_bayes") return single_level_test(field, cfg.level, cfg.alpha, SingleLevelKind::bayes, store);
  if (cfg.test == "single_map") return single_level_test(field, cfg.level, cfg.alpha, SingleLevelKind::map, store);
  throw ConfigError("config: unknown test '" + cfg.test + "'");
}

// ------------------------------------------------------------ CSV emission

void write_metadata(std::ostream& out, const ExperimentConfig& cfg, const std::vector<CalibrationEntry>& used) {
  out << "# monotest " << version() << '\n';
  out << "# simd_backend=" << simd::backend_name(simd::active_backend()) << '\n';
  for (const auto& [k, v] : cfg.echo()) out << "# config." << k << '=' << v << '\n';
  for (const auto& e : used) out << "# calibration=" << CalibrationStore::format_record(e) << '\n';
}

void write_figure1_csv(std::ostream& out, const std::vector<Figure1Row>& rows) {
  out << "n_h,x,logtail_B,logtail_zeta,delta,se,band,count_B,count_zeta\n";
  for (const auto& r : rows) {
    write_row(out, {std::to_string(r.n_h), format_double(r.x), format_double(r.logtail_B),
                    format_double(r.logtail_zeta), format_double(r.delta), format_double(r.se),
                    format_double(3.0 * r.se), std::to_string(r.count_B), std::to_string(r.count_zeta)});
  }
}

void write_figure2_csv(std::ostream& out, const std::vector<Figure2Row>& rows) {
  out << "m,k,L,L_tilde,delta,delta_times_psi\n";
  for (const auto& r : rows) {
    write_row(out, {std::to_string(r.m), std::to_string(r.k), format_double(r.L), format_double(r.L_tilde),
                    format_double(r.delta), format_double(r.delta_times_psi)});
  }
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepResult>& rows) {
  out << "test,offset,reps,rejections,rate,beta_bar,se,critical_value\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < spec.tests.size(); ++i) {
      write_row(out, {std::string(to_string(spec.tests[i])), format_double(r.offset), std::to_string(r.reps),
                      std::to_string(r.rejections[i]), format_double(r.rate(i)), format_double(r.beta_bar(i)),
                      format_double(r.se(i)), format_double(critical_value_for(spec, spec.tests[i]))});
    }
  }
}

void run_experiment(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.experiment == "figure2") {
    const auto rows = run_figure2(cfg.m_list, cfg.adaptive_eps, cfg.k_max);
    write_metadata(out, cfg);
    write_figure2_csv(out, rows);
    return;
  }
  const std::uint64_t seed = cfg.require_seed();
  if (cfg.experiment == "figure1") {
    Figure1Options opts;
    opts.x_min = cfg.x_min;
    opts.x_step = cfg.x_step;
    opts.min_exceedances = static_cast<std::size_t>(std::max(cfg.min_exceedances, 1));
    opts.zeta_truncation = cfg.zeta_truncation;
    const auto rows = run_figure1(cfg.n_h_list, cfg.reps, seed, opts);
    write_metadata(out, cfg);
    write_figure1_csv(out, rows);
    return;
  }
  if (cfg.experiment == "type1" || cfg.experiment == "power") {
    std::optional<CalibrationStore> store;
    if (!cfg.calibration_cache.empty()) store.emplace(cfg.calibration_cache);
    SweepSpec spec = sweep_spec_from_config(cfg, store ? &*store : nullptr);
    const bool field = cfg.engine == "field";
    if (!field && cfg.engine != "summary") throw ConfigError("config: unknown engine '" + cfg.engine + "'");
    std::vector<SweepResult> rows;
    if (cfg.experiment == "type1") {
      spec.null_only = true;
      rows.push_back(field ? simulate_sweep_point_field(spec, 0.0, cfg.reps, seed)
                           : simulate_sweep_point(spec, 0.0, cfg.reps, seed));
    } else {
      for (std::size_t i = 0; i < cfg.offsets.size(); ++i) {
        const std::uint64_t s = derive_seed(seed, i);
        rows.push_back(field ? simulate_sweep_point_field(spec, cfg.offsets[i], cfg.reps, s)
                             : simulate_sweep_point(spec, cfg.offsets[i], cfg.reps, s));
      }
    }
    write_metadata(out, cfg, spec.calibration_used);
    write_sweep_csv(out, spec, rows);
    return;
  }
  throw ConfigError("run_experiment: unsupported experiment '" + cfg.experiment + "'");
}

}  // namespace monotest
