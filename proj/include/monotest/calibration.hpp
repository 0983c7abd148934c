#pragma once

// Critical values for the single- and multi-level tests and their
// persistent cache.
//
// Cache file: one record per line, comma separated, '#' lines are comments:
//   kind,n_h,alpha,reps,seed,value,mc_stderr
// Reals are written with 17 significant digits so that keys round-trip
// exactly. Records are appended whole; a trailing partial line (no newline)
// is ignored by readers. Closed-form entries carry reps = 0 and seed = 0.
// exp_sup has no level (n_h = 0); for zeta_circ the n_h column holds the
// series truncation K.

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "monotest/null_dists.hpp"

namespace monotest {

enum class CalibrationKind {
  bayes_single,  // t_alpha^B: upper quantile of B_h under theta = 0
  map_single,    // t_alpha^M: upper quantile of max_t S(xi_t) / n_h
  zeta_circ,     // q_alpha^o: upper quantile of zeta_circ
  exp_sup,       // q_alpha^kappa: closed form
};

[[nodiscard]] std::string_view to_string(CalibrationKind kind) noexcept;
[[nodiscard]] std::optional<CalibrationKind> parse_calibration_kind(std::string_view text) noexcept;

struct CalibrationEntry {
  CalibrationKind kind = CalibrationKind::exp_sup;
  std::uint64_t n_h = 0;
  double alpha = 0.05;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  double mc_stderr = 0.0;
};

/// Refusal to estimate a quantile that the replication count cannot resolve.
class EstimabilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Lookup miss; what() names the command that would produce the entry.
class CalibrationMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationOptions {
  /// Truncation of the zeta_circ series.
  std::uint64_t zeta_truncation = 1'000'000;
  WalkOptions walk{};
  int bootstrap_resamples = 200;
  /// Below this alpha the closed-form / coupling routes replace raw Monte Carlo.
  double extreme_alpha = 1e-4;
};

/// Diagnostics that are reported but not persisted.
struct CalibrationDiagnostics {
  std::string route;                 // "monte_carlo", "closed_form", "tail_coupling"
  double truncation_drift = 0.0;     // zeta_circ: quantile(K) - quantile(K/100)
};

/// Computes one critical value. For zeta_circ, n_h is the truncation K
/// (0 = options.zeta_truncation). Monte Carlo requires reps * alpha >= 100
/// (EstimabilityError otherwise). For alpha < options.extreme_alpha:
/// map_single uses the exact finite-n law, bayes_single and zeta_circ use
/// conditional Monte Carlo on the first arrival of zeta_circ.
[[nodiscard]] CalibrationEntry calibrate(CalibrationKind kind, std::uint64_t n_h, double alpha, std::uint64_t reps,
                                         std::uint64_t seed, const CalibrationOptions& options = {},
                                         CalibrationDiagnostics* diagnostics = nullptr);

/// Upper alpha-quantile of zeta_circ for small alpha by conditional Monte
/// Carlo on the first arrival: with E_k = E_1 + W_{k-1}, the event
/// {zeta_circ > x} is {E_1 < e*(x, W)}, so P = E_W[1 - exp(-e*)].
struct TailQuantile {
  double value = 0.0;
  double stderr_ = 0.0;
};
[[nodiscard]] TailQuantile zeta_circ_tail_quantile(double alpha, std::size_t reps, std::uint64_t seed,
                                                   std::uint64_t truncation, const WalkOptions& walk = {});

/// Shell command that would produce a missing entry.
[[nodiscard]] std::string calibrate_command_hint(CalibrationKind kind, std::uint64_t n_h, double alpha);

/// Append-only table of calibration entries, optionally backed by a file.
/// Writers are serialized through an internal mutex and each record is
/// emitted with a single write.
class CalibrationStore {
 public:
  /// In-memory store.
  CalibrationStore() = default;
  /// Loads complete records from `file` (missing file = empty store).
  explicit CalibrationStore(std::filesystem::path file);

  CalibrationStore(const CalibrationStore&) = delete;
  CalibrationStore& operator=(const CalibrationStore&) = delete;

  [[nodiscard]] std::optional<CalibrationEntry> find_exact(CalibrationKind kind, std::uint64_t n_h, double alpha,
                                                           std::uint64_t reps, std::uint64_t seed) const;
  /// Any entry for (kind, n_h, alpha); prefers the largest replication count.
  [[nodiscard]] std::optional<CalibrationEntry> find(CalibrationKind kind, std::uint64_t n_h, double alpha) const;
  /// find() or throw CalibrationMissing with the command hint.
  [[nodiscard]] CalibrationEntry require(CalibrationKind kind, std::uint64_t n_h, double alpha) const;

  void append(const CalibrationEntry& entry);
  [[nodiscard]] std::vector<CalibrationEntry> entries() const;
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return file_; }

  [[nodiscard]] static std::string format_record(const CalibrationEntry& entry);
  [[nodiscard]] static std::optional<CalibrationEntry> parse_record(std::string_view line);

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::vector<CalibrationEntry> entries_;
};

/// Key under which calibrate() records its result (closed-form routes drop
/// reps and seed, zeta_circ resolves its truncation).
[[nodiscard]] CalibrationEntry calibration_key(CalibrationKind kind, std::uint64_t n_h, double alpha,
                                              std::uint64_t reps, std::uint64_t seed,
                                              const CalibrationOptions& options = {});

/// Exact-key reuse from the store, otherwise calibrate and append.
[[nodiscard]] CalibrationEntry calibrate_cached(CalibrationStore& store, CalibrationKind kind, std::uint64_t n_h,
                                                double alpha, std::uint64_t reps, std::uint64_t seed,
                                                const CalibrationOptions& options = {},
                                                CalibrationDiagnostics* diagnostics = nullptr);

}  // namespace monotest
