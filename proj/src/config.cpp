#include "oblim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "oblim/errors.hpp"

namespace oblim {

ImexConfig StudyConfig::imex() const {
  ImexConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.callback_stride = callback_stride;
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "dim",      "n",           "box_length",       "dealias",         "a",
      "gamma",    "mu1",         "mu2",              "nu",              "beta",
      "k",        "L_poly",      "zbar",             "A0",              "epsilons",
      "delta",    "seed",        "dt",               "t_end",           "callback_stride",
      "output_dir", "energy_tolerance", "growth_limit", "acoustic_spread", "beta0_min",
      "beta0_max", "r2_min"};
  return keys;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected a number, got '" + std::string(v) + "'");
  return out;
}

long long to_integer(const std::string& key, std::string_view v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_unsigned(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(key, "expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

std::vector<double> to_list(const std::string& key, std::string_view v) {
  std::vector<double> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(to_double(key, trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v = v.substr(comma + 1);
  }
  return out;
}

}  // namespace

StudyConfig parse_config(std::string_view text) {
  StudyConfig cfg;
  int dim = cfg.grid.dim;
  long long n = cfg.grid.n;
  double box = cfg.grid.box_length;
  double dealias_fraction = cfg.grid.dealias_fraction;

  const auto& keys = config_keys();
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(key, "unknown key (line " + std::to_string(line_no) + ")");
    if (seen.count(key) != 0)
      throw ConfigError(key, "repeated on line " + std::to_string(line_no) + ", first set on line " +
                                 std::to_string(seen[key]));
    seen[key] = line_no;
    if (value.empty()) throw ConfigError(key, "empty value (line " + std::to_string(line_no) + ")");

    auto& p = cfg.params;
    if (key == "dim") dim = static_cast<int>(to_integer(key, value));
    else if (key == "n") n = to_integer(key, value);
    else if (key == "box_length") box = to_double(key, value);
    else if (key == "dealias") dealias_fraction = to_double(key, value);
    else if (key == "a") p.a = to_double(key, value);
    else if (key == "gamma") p.gamma = to_double(key, value);
    else if (key == "mu1") p.mu1 = to_double(key, value);
    else if (key == "mu2") p.mu2 = to_double(key, value);
    else if (key == "nu") p.nu = to_double(key, value);
    else if (key == "beta") p.beta = to_double(key, value);
    else if (key == "k") p.k = to_double(key, value);
    else if (key == "L_poly") p.L_poly = to_double(key, value);
    else if (key == "zbar") p.zbar = to_double(key, value);
    else if (key == "A0") p.A0 = to_double(key, value);
    else if (key == "epsilons") cfg.epsilons = to_list(key, value);
    else if (key == "delta") cfg.delta = to_double(key, value);
    else if (key == "seed") cfg.seed = to_unsigned(key, value);
    else if (key == "dt") cfg.dt = to_double(key, value);
    else if (key == "t_end") cfg.t_end = to_double(key, value);
    else if (key == "callback_stride") cfg.callback_stride = static_cast<int>(to_integer(key, value));
    else if (key == "output_dir") cfg.output_dir = std::string(value);
    else if (key == "energy_tolerance") cfg.energy_tolerance = to_double(key, value);
    else if (key == "growth_limit") cfg.growth_limit = to_double(key, value);
    else if (key == "acoustic_spread") cfg.acoustic_spread = to_double(key, value);
    else if (key == "beta0_min") cfg.beta0_min = to_double(key, value);
    else if (key == "beta0_max") cfg.beta0_max = to_double(key, value);
    else if (key == "r2_min") cfg.r2_min = to_double(key, value);
  }

  if (n < 8 || n % 2 != 0 || n > 4096)
    throw ConfigError("n", "must be even and >= 8, got " + std::to_string(n));
  cfg.grid = make_grid(dim, static_cast<int>(n), box, dealias_fraction);
  cfg.params.validate();

  if (cfg.epsilons.empty()) throw ConfigError("epsilons", "must not be empty");
  for (double e : cfg.epsilons)
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("epsilons", "every epsilon must lie in (0, 1]");
  for (std::size_t i = 1; i < cfg.epsilons.size(); ++i)
    if (!(cfg.epsilons[i] < cfg.epsilons[i - 1]))
      throw ConfigError("epsilons", "epsilons must be strictly descending");
  if (!(cfg.delta >= 0.0) || !std::isfinite(cfg.delta)) throw ConfigError("delta", "must be >= 0");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt", "must be positive");
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw ConfigError("t_end", "must be >= 0");
  if (cfg.callback_stride < 1) throw ConfigError("callback_stride", "must be >= 1");
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (!(cfg.energy_tolerance >= 0.0)) throw ConfigError("energy_tolerance", "must be >= 0");
  if (!(cfg.growth_limit >= 1.0)) throw ConfigError("growth_limit", "must be >= 1");
  if (!(cfg.acoustic_spread >= 1.0)) throw ConfigError("acoustic_spread", "must be >= 1");
  if (!(cfg.beta0_min <= cfg.beta0_max)) throw ConfigError("beta0_min", "must not exceed beta0_max");
  if (!(cfg.r2_min >= 0.0 && cfg.r2_min <= 1.0)) throw ConfigError("r2_min", "must lie in [0, 1]");
  return cfg;
}

StudyConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace oblim
