#pragma once

// Monte Carlo harness: figure data, type I / type II sweeps, the end-to-end
// test pipeline and CSV emission. Every run is a pure function of its
// configuration (seed included).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monotest/calibration.hpp"
#include "monotest/haar.hpp"
#include "monotest/hypothesis_tests.hpp"
#include "monotest/priors.hpp"

namespace monotest {

[[nodiscard]] std::string_view version() noexcept;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat key=value configuration. Unknown keys are rejected.
struct ExperimentConfig {
  std::string experiment = "type1";  // figure1 figure2 type1 power calibrate test
  std::optional<std::uint64_t> seed;  // mandatory for every Monte Carlo run
  std::uint64_t reps = 10000;
  double alpha = 0.05;

  // model
  double sigma = 1.0;     // per-sample noise sd for `test`, continuum sigma otherwise
  int resolution = 12;    // J: 2^J samples
  int max_level = 0;      // 0 = default (J - 2 for signals, prior support for sweeps)

  // location / informed prior: uniform_levels | omega_nu
  std::string prior = "omega_nu";
  double omega = 64.0;
  std::string nu = "uniform";
  int prior_levels = 8;   // uniform_levels support
  int adaptive_m = 1;
  double adaptive_eps = 0.1;

  // tests
  std::string test = "map";               // map | bayes | adaptive | single_bayes | single_map
  std::vector<std::string> tests = {"map", "bayes", "adaptive"};  // power sweep
  int level = 1;                          // single-level tests
  std::uint64_t zeta_truncation = 1'000'000;
  std::string calibration_cache;          // file; empty = none

  // power sweep
  std::vector<double> offsets = {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0};
  std::string amplitude_rule = "R";       // R | R_tilde | R_plus
  std::string engine = "summary";         // summary | field

  // figure1
  std::vector<std::uint64_t> n_h_list = {4, 1024};
  double x_min = -3.0;
  double x_step = 0.05;
  int min_exceedances = 100;

  // figure2
  std::vector<int> m_list = {1, 2};
  int k_max = 10000;

  // calibrate
  std::string kind = "bayes_single";
  std::uint64_t n_h = 64;

  // test pipeline
  std::string signal_file;
  std::string generator = "linear";  // linear | constant | dip
  double dip_center = 0.5;
  double dip_width = 0.125;
  double dip_depth = 1.0;

  std::string output;  // empty = stdout

  /// Sets one key from text; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// All keys with their current values, in a fixed order.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> echo() const;
  [[nodiscard]] std::uint64_t require_seed() const;
};

/// Parses key=value lines ('#' comments, blank lines ignored).
[[nodiscard]] ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& file, ExperimentConfig base = {});

/// Prior described by the config, built for levels 1..k_max before
/// truncation (omega_nu priors use their full support).
[[nodiscard]] PriorOnLevels prior_from_config(const ExperimentConfig& cfg);

// ---------------------------------------------------------------- figure 1

struct Figure1Row {
  std::uint64_t n_h = 0;
  double x = 0.0;
  double logtail_B = 0.0;     // log P{B - log n + gamma >= x}
  double logtail_zeta = 0.0;  // log P{zeta_circ + 2 gamma - 1 >= x}
  double delta = 0.0;
  double se = 0.0;            // delta-method s.e. of delta
  std::size_t count_B = 0;
  std::size_t count_zeta = 0;
};

struct Figure1Options {
  double x_min = -3.0;
  double x_step = 0.05;
  std::size_t min_exceedances = 100;
  std::uint64_t zeta_truncation = 1'000'000;
};

/// Delta(x; n_h) on the grid x_0 = x_min, x_{g+1} = x_g + step * max(1, x_g)
/// (linear up to 1, geometric beyond). Rows are emitted where both samples
/// have at least min_exceedances draws >= x and as many below x; the grid
/// stops once either exceedance count drops under the minimum.
[[nodiscard]] std::vector<Figure1Row> run_figure1(const std::vector<std::uint64_t>& n_h_list, std::size_t reps,
                                                  std::uint64_t seed, const Figure1Options& opts = {});

// ---------------------------------------------------------------- figure 2

struct Figure2Row {
  int m = 0;
  int k = 0;
  double L = 0.0;
  double L_tilde = 0.0;
  double delta = 0.0;
  double delta_times_psi = 0.0;
};

[[nodiscard]] std::vector<Figure2Row> run_figure2(const std::vector<int>& m_list, double eps, int k_max);

// ------------------------------------------------------------ power sweeps

/// Multi-level procedures evaluated on the same draws.
enum class SweepTest { map, bayes, adaptive };
[[nodiscard]] std::string_view to_string(SweepTest t) noexcept;
[[nodiscard]] SweepTest parse_sweep_test(std::string_view name);

struct SweepSpec {
  PriorOnLevels prior;             // location law of the spike and MAP/Bayes prior
  int levels = 0;                  // levels carried by the field (>= prior support)
  AdaptiveWeights adaptive;        // used by SweepTest::adaptive
  double alpha = 0.05;
  double zeta_critical = 0.0;      // q_alpha^o for the Bayes test
  std::vector<SweepTest> tests;
  /// Amplitude in units of sigma_h: max(0, sqrt(R) + offset) with R the
  /// critical SNR of this kind at q = q_alpha^kappa and H = prior entropy
  /// (R) or omega (R_tilde, R_plus).
  SnrKind amplitude_kind = SnrKind::R;
  double omega = 64.0;
  bool null_only = false;          // no spike (type I error)
  std::vector<CalibrationEntry> calibration_used;  // provenance for CSV metadata
};

struct SweepResult {
  double offset = 0.0;
  std::size_t reps = 0;
  std::vector<std::size_t> rejections;  // per SweepTest in spec order

  [[nodiscard]] double beta_bar(std::size_t i) const;   // 1 - rejection rate
  [[nodiscard]] double rate(std::size_t i) const;
  [[nodiscard]] double se(std::size_t i) const;         // binomial s.e.
};

/// Amplitude A_h / sigma_h planted at level k for a given offset.
[[nodiscard]] double planted_amplitude(const SweepSpec& spec, int level, double offset);

/// Level-summary engine: the spiked level is simulated as n_h - 1 null scores
/// plus the spike; every other level contributes an exact null (max, sum)
/// draw. Works for levels up to 63.
[[nodiscard]] SweepResult simulate_sweep_point(const SweepSpec& spec, double offset, std::size_t reps,
                                               std::uint64_t seed);

/// Field engine: builds the whole coefficient field and runs the tests of
/// the `tests` module on it. Levels <= 20.
[[nodiscard]] SweepResult simulate_sweep_point_field(const SweepSpec& spec, double offset, std::size_t reps,
                                                     std::uint64_t seed);

/// Per-replication statistics of the level-summary engine (for engine
/// cross-checks): one vector per test in spec order.
[[nodiscard]] std::vector<std::vector<double>> sweep_statistics(const SweepSpec& spec, double offset,
                                                                std::size_t reps, std::uint64_t seed,
                                                                bool field_engine);

/// Builds a sweep spec from the config (prior, adaptive weights, Bayes
/// critical value from the calibration store or a fresh zeta_circ run).
[[nodiscard]] SweepSpec sweep_spec_from_config(const ExperimentConfig& cfg, CalibrationStore* store);

// ----------------------------------------------------------------- type I

struct Type1Result {
  std::string test;
  std::size_t reps = 0;
  std::size_t rejections = 0;
  [[nodiscard]] double rate() const;
  [[nodiscard]] double se() const;
};

/// Null rejection rate of a multi-level MAP test with `prior` on a zero field
/// of `levels` levels, built and tested through the field path.
[[nodiscard]] Type1Result multilevel_map_type1(const PriorOnLevels& prior, int levels, double alpha, std::size_t reps,
                                               std::uint64_t seed);

/// Rejection rate of the single-level Bayes test at a given truth level row
/// (theta in units of sigma_h), critical value t^B supplied.
[[nodiscard]] Type1Result single_bayes_rejection_rate(const std::vector<double>& standardized_truth,
                                                      double critical_value, std::size_t reps, std::uint64_t seed);

// ------------------------------------------------------------ test pipeline

[[nodiscard]] SampledSignal signal_from_config(const ExperimentConfig& cfg);
[[nodiscard]] SampledSignal read_signal(std::istream& in, double noise_sigma);

/// samples -> Haar estimates -> configured test.
[[nodiscard]] TestReport run_test(const SampledSignal& signal, const ExperimentConfig& cfg,
                                  const CalibrationStore& store);

// ------------------------------------------------------------ CSV emission

/// Writes '#' metadata: version, kernel backend, config echo, calibration keys.
void write_metadata(std::ostream& out, const ExperimentConfig& cfg,
                    const std::vector<CalibrationEntry>& calibration_used = {});

void write_figure1_csv(std::ostream& out, const std::vector<Figure1Row>& rows);
void write_figure2_csv(std::ostream& out, const std::vector<Figure2Row>& rows);
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepResult>& rows);

/// Runs figure1, figure2, type1 or power as named in cfg.experiment and
/// writes metadata plus CSV to `out`.
void run_experiment(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace monotest
