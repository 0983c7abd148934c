#include "monotest/calibration.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "monotest/parallel.hpp"
#include "monotest/simd_kernels.hpp"
#include "monotest/stats.hpp"

namespace monotest {
namespace {

constexpr std::array<std::string_view, 4> kKindNames = {"bayes_single", "map_single", "zeta_circ", "exp_sup"};

bool closed_form(CalibrationKind kind, double alpha, const CalibrationOptions& opt) {
  return kind == CalibrationKind::exp_sup || (kind == CalibrationKind::map_single && alpha < opt.extreme_alpha);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("calibrate: alpha must lie in (0, 1)");
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

/// Null draws of max_t S(xi_t) / n.
std::vector<double> simulate_map_null(std::uint64_t n, std::size_t reps, std::uint64_t seed) {
  std::vector<double> out(reps);
  const double log_n = std::log(static_cast<double>(n));
  constexpr std::uint64_t kDirect = 1u << 16;
  const std::size_t chunk = n <= kDirect ? std::max<std::size_t>(1, (1u << 20) / n) : 4096;
  for_each_chunk(reps, chunk, [&](std::uint64_t c, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, c);
    std::vector<double> u(n <= kDirect ? n : 0);
    const auto& kern = simd::kernels();
    for (std::size_t r = begin; r < end; ++r) {
      double log_max;
      if (n <= kDirect) {
        for (double& x : u) x = open_uniform(eng);
        const double u_min = kern.min_value(u.data(), n);
        log_max = std::log1p(-u_min) - std::log(u_min);
      } else {
        log_max = draw_null_log_max_score(n, eng);
      }
      out[r] = std::exp(log_max - log_n);
    }
  });
  return out;
}

}  // namespace

std::string_view to_string(CalibrationKind kind) noexcept { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<CalibrationKind> parse_calibration_kind(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return static_cast<CalibrationKind>(i);
  }
  return std::nullopt;
}

TailQuantile zeta_circ_tail_quantile(double alpha, std::size_t reps, std::uint64_t seed, std::uint64_t truncation,
                                     const WalkOptions& walk) {
  check_alpha(alpha);
  if (reps < 100) throw std::invalid_argument("zeta_circ_tail_quantile: need at least 100 draws");
  if (truncation < 10) throw std::domain_error("zeta_circ_tail_quantile: truncation K must be >= 10");

  // Write E_k = E_1 + W_{k-1} with W independent of E_1. Then
  //   zeta_circ = 1/e + sum_{j<=m} 1/(e + W_j) + c(W),   e = E_1,
  // where c collects the constants and the terms j > m, frozen at e = 0 (they
  // move by O(e / m)). The map e -> zeta_circ is decreasing, so
  //   P{zeta_circ > x} = E_W[1 - exp(-e*)],  e* the root in e.
  constexpr std::size_t m = 16;
  WalkOptions w = walk;
  w.exact_terms = std::max<std::uint64_t>(w.exact_terms, m);
  const std::uint64_t n_walk = truncation - 1;
  const double h_tail = harmonic_number(truncation) - harmonic_number(m + 1);  // sum_{j=m+1}^{K-1} 1/(j+1)
  double h_head = 0.0;
  for (std::size_t j = 1; j <= m; ++j) h_head += 1.0 / static_cast<double>(j + 1);

  std::vector<double> heads(reps * m);
  std::vector<double> consts(reps);
  const std::size_t chunk = std::max<std::size_t>(1, (std::size_t{1} << 20) / (m + 64));
  for_each_chunk(reps, chunk, [&](std::uint64_t c, std::size_t begin, std::size_t end) {
    Engine eng = make_engine(seed, c);
    std::vector<double> scratch;
    for (std::size_t r = begin; r < end; ++r) {
      const WalkDraw d = draw_gamma_walk(n_walk, 0, w, eng, scratch);
      double head_inv = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        heads[r * m + j] = scratch[j];
        head_inv += 1.0 / scratch[j];
      }
      consts[r] = -1.0 - h_head + (d.sum_inverse - head_inv - h_tail);
    }
  });

  struct Root {
    double g = 1.0;      // 1 - exp(-e*)
    double slope = 0.0;  // d g / d x
  };
  auto solve = [&](std::size_t r, double x) {
    Root out;
    const double c = consts[r];
    if (c >= x) return out;  // zeta_circ > x for every e
    const double* W = &heads[r * m];
    // h(e) = 1/e + sum 1/(e + W_j) + c - x is convex and decreasing; Newton
    // from the left of the root climbs monotonically onto it
    double e = 1.0 / (x - c);
    double dh = 0.0;
    for (int it = 0; it < 100; ++it) {
      double h = 1.0 / e + c - x;
      dh = -1.0 / (e * e);
      for (std::size_t j = 0; j < m; ++j) {
        const double v = 1.0 / (e + W[j]);
        h += v;
        dh -= v * v;
      }
      const double step = -h / dh;
      e += step;
      if (std::abs(step) <= 1e-14 * e) break;
    }
    out.g = -std::expm1(-e);
    out.slope = std::exp(-e) / std::abs(dh);
    return out;
  };
  auto tail = [&](double x) {
    double s = 0.0;
    for (std::size_t r = 0; r < reps; ++r) s += solve(r, x).g;
    return s / static_cast<double>(reps);
  };

  double lo = 0.0;
  if (tail(lo) < alpha) throw std::domain_error("zeta_circ_tail_quantile: alpha too large for the tail route");
  double hi = 4.0 / alpha;
  while (tail(hi) > alpha) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-11 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > alpha ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);

  // delta method: sd of the per-draw terms over the slope of their mean
  double sum = 0.0, sum2 = 0.0, slope = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const Root t = solve(r, x);
    sum += t.g;
    sum2 += t.g * t.g;
    slope += t.slope;
  }
  const double n = static_cast<double>(reps);
  const double var = std::max(0.0, (sum2 - sum * sum / n) / (n - 1.0));
  slope /= n;
  TailQuantile out;
  out.value = x;
  out.stderr_ = slope > 0.0 ? std::sqrt(var / n) / slope : 0.0;
  return out;
}

CalibrationEntry calibration_key(CalibrationKind kind, std::uint64_t n_h, double alpha, std::uint64_t reps,
                                 std::uint64_t seed, const CalibrationOptions& options) {
  CalibrationEntry key;
  key.kind = kind;
  key.alpha = alpha;
  key.n_h = n_h;
  key.reps = reps;
  key.seed = seed;
  if (kind == CalibrationKind::exp_sup) key.n_h = 0;
  if (kind == CalibrationKind::zeta_circ && n_h == 0) key.n_h = options.zeta_truncation;
  if (closed_form(kind, alpha, options)) {
    key.reps = 0;
    key.seed = 0;
  }
  return key;
}

CalibrationEntry calibrate(CalibrationKind kind, std::uint64_t n_h, double alpha, std::uint64_t reps,
                           std::uint64_t seed, const CalibrationOptions& options, CalibrationDiagnostics* diag) {
  check_alpha(alpha);
  CalibrationEntry e = calibration_key(kind, n_h, alpha, reps, seed, options);
  CalibrationDiagnostics local;
  CalibrationDiagnostics& d = diag ? *diag : local;
  d = {};

  if (kind != CalibrationKind::exp_sup && e.n_h == 0) throw std::domain_error("calibrate: n_h must be >= 1");

  if (kind == CalibrationKind::exp_sup) {
    e.value = exp_sup_quantile(alpha);
    d.route = "closed_form";
    return e;
  }
  if (kind == CalibrationKind::map_single && alpha < options.extreme_alpha) {
    e.value = map_single_exact_quantile(e.n_h, alpha);
    d.route = "closed_form";
    return e;
  }
  if (reps == 0) throw std::invalid_argument("calibrate: reps must be >= 1");

  if (alpha < options.extreme_alpha) {
    const std::uint64_t K = kind == CalibrationKind::zeta_circ ? e.n_h : options.zeta_truncation;
    const TailQuantile tq = zeta_circ_tail_quantile(alpha, reps, seed, K, options.walk);
    e.value = tq.value;
    e.mc_stderr = tq.stderr_;
    if (kind == CalibrationKind::bayes_single) {
      // B - log n + gamma ~ zeta_circ + 2 gamma - 1
      e.value += std::log(static_cast<double>(e.n_h)) + kEulerGamma - 1.0;
    }
    d.route = "tail_coupling";
    return e;
  }

  if (static_cast<double>(reps) * alpha < 100.0) {
    const auto need = static_cast<std::uint64_t>(std::ceil(100.0 / alpha));
    throw EstimabilityError("calibrate: reps * alpha = " + format_real(static_cast<double>(reps) * alpha) +
                            " < 100, the " + format_real(1.0 - alpha) +
                            "-quantile is not resolvable; use reps >= " + std::to_string(need) +
                            ", or alpha < " + format_real(options.extreme_alpha) +
                            " for the zeta_circ / exponential closed-form route");
  }

  std::vector<double> draws;
  switch (kind) {
    case CalibrationKind::bayes_single:
      draws = simulate_B_null(e.n_h, reps, seed);
      break;
    case CalibrationKind::map_single:
      draws = simulate_map_null(e.n_h, reps, seed);
      break;
    case CalibrationKind::zeta_circ: {
      const std::uint64_t check = e.n_h / 100 >= 10 ? e.n_h / 100 : 0;
      ZetaCircDraws z = simulate_zeta_circ_with_checkpoint(e.n_h, check, reps, seed, options.walk);
      if (check > 0) d.truncation_drift = quantile_type7(z.at_truncation, 1.0 - alpha) -
                                          quantile_type7(z.at_checkpoint, 1.0 - alpha);
      draws = std::move(z.at_truncation);
      break;
    }
    case CalibrationKind::exp_sup:
      break;
  }
  std::sort(draws.begin(), draws.end());
  e.value = quantile_type7_sorted(draws, 1.0 - alpha);
  e.mc_stderr = bootstrap_quantile_stderr(draws, 1.0 - alpha, options.bootstrap_resamples, seed);
  d.route = "monte_carlo";
  return e;
}

std::string calibrate_command_hint(CalibrationKind kind, std::uint64_t n_h, double alpha) {
  const double reps = std::max(1e5, std::ceil(1000.0 / alpha));
  std::string cmd = "monotest calibrate --kind " + std::string(to_string(kind));
  if (kind != CalibrationKind::exp_sup) cmd += " --nh " + std::to_string(n_h);
  cmd += " --alpha " + format_real(alpha) + " --reps " + format_real(reps) + " --seed 1";
  return cmd;
}

// ---------------------------------------------------------------------------

CalibrationStore::CalibrationStore(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(file_, std::ios::binary);
  if (!in) return;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // partial trailing record
    if (auto e = parse_record(std::string_view(text).substr(pos, nl - pos))) entries_.push_back(*e);
    pos = nl + 1;
  }
}

std::optional<CalibrationEntry> CalibrationStore::find_exact(CalibrationKind kind, std::uint64_t n_h, double alpha,
                                                             std::uint64_t reps, std::uint64_t seed) const {
  std::lock_guard lock(mutex_);
  for (const auto& e : entries_) {
    if (e.kind == kind && e.n_h == n_h && e.alpha == alpha && e.reps == reps && e.seed == seed) return e;
  }
  return std::nullopt;
}

std::optional<CalibrationEntry> CalibrationStore::find(CalibrationKind kind, std::uint64_t n_h, double alpha) const {
  std::lock_guard lock(mutex_);
  std::optional<CalibrationEntry> best;
  for (const auto& e : entries_) {
    if (e.kind != kind || e.n_h != n_h || e.alpha != alpha) continue;
    // closed-form entries (reps = 0) are exact and win outright
    if (e.reps == 0) return e;
    if (!best || e.reps > best->reps) best = e;
  }
  return best;
}

CalibrationEntry CalibrationStore::require(CalibrationKind kind, std::uint64_t n_h, double alpha) const {
  if (auto e = find(kind, n_h, alpha)) return *e;
  std::string where = file_.empty() ? std::string("in-memory table") : file_.string();
  throw CalibrationMissing("no calibration entry for kind=" + std::string(to_string(kind)) +
                           " n_h=" + std::to_string(n_h) + " alpha=" + format_real(alpha) + " in " + where +
                           "; generate it with: " + calibrate_command_hint(kind, n_h, alpha) +
                           (file_.empty() ? std::string() : " --cache " + file_.string()));
}

void CalibrationStore::append(const CalibrationEntry& entry) {
  std::lock_guard lock(mutex_);
  if (!file_.empty()) {
    const bool fresh = !std::filesystem::exists(file_) || std::filesystem::file_size(file_) == 0;
    std::string out;
    if (fresh) out = "# kind,n_h,alpha,reps,seed,value,mc_stderr\n";
    out += format_record(entry);
    out += '\n';
    std::FILE* f = std::fopen(file_.c_str(), "ab");
    if (!f) throw std::runtime_error("cannot open calibration cache " + file_.string());
    const std::size_t written = std::fwrite(out.data(), 1, out.size(), f);
    const bool ok = std::fflush(f) == 0 && written == out.size();
    std::fclose(f);
    if (!ok) throw std::runtime_error("write to calibration cache " + file_.string() + " failed");
  }
  entries_.push_back(entry);
}

std::vector<CalibrationEntry> CalibrationStore::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::string CalibrationStore::format_record(const CalibrationEntry& e) {
  std::string s(to_string(e.kind));
  s += ',' + std::to_string(e.n_h);
  s += ',' + format_real(e.alpha);
  s += ',' + std::to_string(e.reps);
  s += ',' + std::to_string(e.seed);
  s += ',' + format_real(e.value);
  s += ',' + format_real(e.mc_stderr);
  return s;
}

std::optional<CalibrationEntry> CalibrationStore::parse_record(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.empty() || line.front() == '#') return std::nullopt;
  std::array<std::string_view, 7> f;
  std::size_t n = 0;
  while (true) {
    const std::size_t comma = line.find(',');
    if (n == f.size()) return std::nullopt;
    f[n++] = line.substr(0, comma);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  if (n != f.size()) return std::nullopt;
  CalibrationEntry e;
  auto kind = parse_calibration_kind(f[0]);
  if (!kind) return std::nullopt;
  e.kind = *kind;
  if (!parse_number(f[1], e.n_h) || !parse_number(f[2], e.alpha) || !parse_number(f[3], e.reps) ||
      !parse_number(f[4], e.seed) || !parse_number(f[5], e.value) || !parse_number(f[6], e.mc_stderr)) {
    return std::nullopt;
  }
  return e;
}

CalibrationEntry calibrate_cached(CalibrationStore& store, CalibrationKind kind, std::uint64_t n_h, double alpha,
                                  std::uint64_t reps, std::uint64_t seed, const CalibrationOptions& options,
                                  CalibrationDiagnostics* diagnostics) {
  const CalibrationEntry key = calibration_key(kind, n_h, alpha, reps, seed, options);
  if (auto hit = store.find_exact(key.kind, key.n_h, key.alpha, key.reps, key.seed)) {
    if (diagnostics) diagnostics->route = "cache";
    return *hit;
  }
  CalibrationEntry e = calibrate(kind, n_h, alpha, reps, seed, options, diagnostics);
  store.append(e);
  return e;
}

}  // namespace monotest
