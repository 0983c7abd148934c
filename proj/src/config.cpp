#include <charconv>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "monotest/experiments.hpp"
#include "monotest/format.hpp"

namespace monotest {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t c = v.find(',', pos);
    const std::string item = trim(std::string_view(v).substr(pos, c == std::string::npos ? v.size() - pos : c - pos));
    if (!item.empty()) out.push_back(item);
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return out;
}

template <class T>
T parse_as(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  // accept 1e6 style counts for integers
  if constexpr (std::is_integral_v<T>) {
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec == std::errc{} && p == end) return out;
    double d = 0.0;
    auto [p2, ec2] = std::from_chars(v.data(), end, d);
    if (ec2 == std::errc{} && p2 == end && d >= 0.0 && d == static_cast<double>(static_cast<T>(d))) {
      return static_cast<T>(d);
    }
  } else {
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec == std::errc{} && p == end) return out;
  }
  throw ConfigError("config: bad value '" + v + "' for key '" + key + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(parse_as<T>(key, item));
  if (out.empty()) throw ConfigError("config: empty list for key '" + key + "'");
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_same_v<T, double>) {
      s += format_double(xs[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      s += xs[i];
    } else {
      s += std::to_string(xs[i]);
    }
  }
  return s;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "experiment") experiment = v;
  else if (key == "seed") seed = parse_as<std::uint64_t>(key, v);
  else if (key == "reps") reps = parse_as<std::uint64_t>(key, v);
  else if (key == "alpha") alpha = parse_as<double>(key, v);
  else if (key == "sigma") sigma = parse_as<double>(key, v);
  else if (key == "resolution") resolution = parse_as<int>(key, v);
  else if (key == "max_level") max_level = parse_as<int>(key, v);
  else if (key == "prior") prior = v;
  else if (key == "omega") omega = parse_as<double>(key, v);
  else if (key == "nu") nu = v;
  else if (key == "prior_levels") prior_levels = parse_as<int>(key, v);
  else if (key == "adaptive_m") adaptive_m = parse_as<int>(key, v);
  else if (key == "adaptive_eps") adaptive_eps = parse_as<double>(key, v);
  else if (key == "test") test = v;
  else if (key == "tests") tests = split_list(v);
  else if (key == "level") level = parse_as<int>(key, v);
  else if (key == "zeta_truncation") zeta_truncation = parse_as<std::uint64_t>(key, v);
  else if (key == "calibration_cache") calibration_cache = v;
  else if (key == "offsets") offsets = parse_list<double>(key, v);
  else if (key == "amplitude_rule") amplitude_rule = v;
  else if (key == "engine") engine = v;
  else if (key == "n_h_list") n_h_list = parse_list<std::uint64_t>(key, v);
  else if (key == "x_min") x_min = parse_as<double>(key, v);
  else if (key == "x_step") x_step = parse_as<double>(key, v);
  else if (key == "min_exceedances") min_exceedances = parse_as<int>(key, v);
  else if (key == "m_list") m_list = parse_list<int>(key, v);
  else if (key == "k_max") k_max = parse_as<int>(key, v);
  else if (key == "kind") kind = v;
  else if (key == "n_h") n_h = parse_as<std::uint64_t>(key, v);
  else if (key == "signal_file") signal_file = v;
  else if (key == "generator") generator = v;
  else if (key == "dip_center") dip_center = parse_as<double>(key, v);
  else if (key == "dip_width") dip_width = parse_as<double>(key, v);
  else if (key == "dip_depth") dip_depth = parse_as<double>(key, v);
  else if (key == "output") output = v;
  else throw ConfigError("config: unknown key '" + key + "'");

  if (reps < 1) throw ConfigError("config: reps must be >= 1");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  return {
      {"experiment", experiment},
      {"seed", seed ? std::to_string(*seed) : std::string("unset")},
      {"reps", std::to_string(reps)},
      {"alpha", format_double(alpha)},
      {"sigma", format_double(sigma)},
      {"resolution", std::to_string(resolution)},
      {"max_level", std::to_string(max_level)},
      {"prior", prior},
      {"omega", format_double(omega)},
      {"nu", nu},
      {"prior_levels", std::to_string(prior_levels)},
      {"adaptive_m", std::to_string(adaptive_m)},
      {"adaptive_eps", format_double(adaptive_eps)},
      {"test", test},
      {"tests", join(tests)},
      {"level", std::to_string(level)},
      {"zeta_truncation", std::to_string(zeta_truncation)},
      {"calibration_cache", calibration_cache},
      {"offsets", join(offsets)},
      {"amplitude_rule", amplitude_rule},
      {"engine", engine},
      {"n_h_list", join(n_h_list)},
      {"x_min", format_double(x_min)},
      {"x_step", format_double(x_step)},
      {"min_exceedances", std::to_string(min_exceedances)},
      {"m_list", join(m_list)},
      {"k_max", std::to_string(k_max)},
      {"kind", kind},
      {"n_h", std::to_string(n_h)},
      {"signal_file", signal_file},
      {"generator", generator},
      {"dip_center", format_double(dip_center)},
      {"dip_width", format_double(dip_width)},
      {"dip_depth", format_double(dip_depth)},
      {"output", output},
  };
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw ConfigError("config: seed is mandatory (set seed=<u64> or pass --seed)");
  return *seed;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig cfg) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string line = trim(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value, got '" + line + "'");
    }
    cfg.set(trim(std::string_view(line).substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file, ExperimentConfig base) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

}  // namespace monotest
