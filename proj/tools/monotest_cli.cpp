// monotest: command line front end.
//
// Exit status: 0 success (test: H0 retained), 10 test rejected H0,
// 11 usage or parse error, 12 missing calibration, 13 numeric domain error,
// 14 other failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "monotest/calibration.hpp"
#include "monotest/experiments.hpp"

namespace {

constexpr int kExitReject = 10;
constexpr int kExitUsage = 11;
constexpr int kExitMissingCalibration = 12;
constexpr int kExitDomain = 13;
constexpr int kExitOther = 14;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> reps;
  std::optional<double> alpha;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "flat key=value config file");
  sub->add_option("--seed", f.seed, "RNG seed (u64)");
  sub->add_option("--reps", f.reps, "Monte Carlo replications");
  sub->add_option("--alpha", f.alpha, "test level");
  sub->add_option("--out", f.out, "output path (default stdout)");
  sub->add_option("--set", f.overrides, "extra key=value config override (repeatable)");
}

monotest::ExperimentConfig build_config(const std::string& experiment, const CommonFlags& f) {
  monotest::ExperimentConfig cfg;
  if (!f.config.empty()) cfg = monotest::load_config(f.config);
  cfg.experiment = experiment;
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw monotest::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.reps) cfg.set("reps", std::to_string(*f.reps));
  if (f.alpha) cfg.alpha = *f.alpha;
  if (!f.out.empty()) cfg.output = f.out;
  return cfg;
}

template <class Fn>
int with_output(const monotest::ExperimentConfig& cfg, Fn&& fn) {
  if (cfg.output.empty()) return fn(std::cout);
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + cfg.output);
  const int rc = fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + cfg.output + " failed");
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes, MAP and adaptive tests for monotonicity in white Gaussian noise"};
  app.set_version_flag("--version", std::string(monotest::version()));
  app.require_subcommand(1);

  CommonFlags cal_f, test_f, fig1_f, fig2_f, t1_f, pow_f;

  auto* cal = app.add_subcommand("calibrate", "compute a critical value and append it to the cache");
  add_common(cal, cal_f);
  std::string kind, cache;
  std::optional<std::uint64_t> nh;
  cal->add_option("--kind", kind, "bayes_single | map_single | zeta_circ | exp_sup");
  cal->add_option("--nh", nh, "level size n_h (zeta_circ: truncation K)");
  cal->add_option("--cache", cache, "calibration cache file");

  auto* tst = app.add_subcommand("test", "run a multi-level test on a signal");
  add_common(tst, test_f);
  std::string signal, test_cache, test_kind;
  tst->add_option("--signal", signal, "one sample per line; omit to use the configured generator");
  tst->add_option("--cache", test_cache, "calibration cache file");
  tst->add_option("--test", test_kind, "map | bayes | adaptive | single_bayes | single_map");

  auto* fig1 = app.add_subcommand("figure1", "log-tail approximation errors of the level average");
  add_common(fig1, fig1_f);
  auto* fig2 = app.add_subcommand("figure2", "iterated-log weights L, their approximation and error");
  add_common(fig2, fig2_f);
  auto* t1 = app.add_subcommand("type1", "null rejection rates of the multi-level tests");
  add_common(t1, t1_f);
  auto* pw = app.add_subcommand("power", "average type II error across amplitudes around the critical SNR");
  add_common(pw, pow_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (cal->parsed()) {
      auto cfg = build_config("calibrate", cal_f);
      if (!kind.empty()) cfg.kind = kind;
      if (nh) cfg.n_h = *nh;
      if (!cache.empty()) cfg.calibration_cache = cache;
      const auto k = monotest::parse_calibration_kind(cfg.kind);
      if (!k) throw monotest::ConfigError("unknown calibration kind '" + cfg.kind + "'");
      monotest::CalibrationStore store = cfg.calibration_cache.empty()
                                             ? monotest::CalibrationStore()
                                             : monotest::CalibrationStore(cfg.calibration_cache);
      monotest::CalibrationDiagnostics diag;
      const std::uint64_t n = *k == monotest::CalibrationKind::zeta_circ && !nh ? cfg.zeta_truncation : cfg.n_h;
      const auto e = monotest::calibrate_cached(store, *k, n, cfg.alpha, cfg.reps, cfg.require_seed(), {}, &diag);
      return with_output(cfg, [&](std::ostream& out) {
        monotest::write_metadata(out, cfg);
        out << "# route=" << diag.route << '\n';
        if (*k == monotest::CalibrationKind::zeta_circ && diag.route == "monte_carlo") {
          out << "# truncation_drift=" << diag.truncation_drift << '\n';
        }
        out << "kind,n_h,alpha,reps,seed,value,mc_stderr\n" << monotest::CalibrationStore::format_record(e) << '\n';
        return 0;
      });
    }
    if (tst->parsed()) {
      auto cfg = build_config("test", test_f);
      if (!signal.empty()) cfg.signal_file = signal;
      if (!test_cache.empty()) cfg.calibration_cache = test_cache;
      if (!test_kind.empty()) cfg.test = test_kind;
      if (cfg.signal_file.empty()) static_cast<void>(cfg.require_seed());
      monotest::CalibrationStore store = cfg.calibration_cache.empty()
                                             ? monotest::CalibrationStore()
                                             : monotest::CalibrationStore(cfg.calibration_cache);
      const auto sig = monotest::signal_from_config(cfg);
      const auto report = monotest::run_test(sig, cfg, store);
      return with_output(cfg, [&](std::ostream& out) {
        out << "monotest_version=" << monotest::version() << '\n' << report.to_record();
        return report.rejects() ? kExitReject : 0;
      });
    }
    const std::pair<CLI::App*, CommonFlags*> runs[] = {{fig1, &fig1_f}, {fig2, &fig2_f}, {t1, &t1_f}, {pw, &pow_f}};
    for (const auto& [sub, flags] : runs) {
      if (!sub->parsed()) continue;
      const auto cfg = build_config(sub->get_name() == "power" ? "power" : sub->get_name(), *flags);
      return with_output(cfg, [&](std::ostream& out) {
        monotest::run_experiment(cfg, out);
        return 0;
      });
    }
  } catch (const monotest::ConfigError& e) {
    std::cerr << "monotest: " << e.what() << '\n';
    return kExitUsage;
  } catch (const monotest::CalibrationMissing& e) {
    std::cerr << "monotest: " << e.what() << '\n';
    return kExitMissingCalibration;
  } catch (const monotest::EstimabilityError& e) {
    std::cerr << "monotest: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "monotest: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "monotest: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "monotest: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitUsage;
}
