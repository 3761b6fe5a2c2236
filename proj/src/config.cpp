#include "nstorus/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nstorus/norm_series.hpp"

namespace nstorus {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key, "empty list entry");
    out.push_back(to_double(key, item));
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace

GridSpec ExperimentConfig::grid() const {
  return K > 0 ? GridSpec(N, K, dealias) : GridSpec(N, dealias);
}

void ExperimentConfig::validate() const {
  try {
    (void)grid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(K > 0 ? "K" : "N", e.what());
  }
  if (!(dt > 0)) throw ConfigError("dt", "must be positive");
  if (!(horizon > 0)) throw ConfigError("horizon", "must be positive");
  if (mode == HorizonMode::short_term && horizon > 1)
    throw ConfigError("horizon", "short-term mode requires horizon <= 1");
  if (!(c > 0)) throw ConfigError("c", "must be positive");
  if (!(picard_tol > 0)) throw ConfigError("picard_tol", "must be positive");
  if (picard_max_iter < 1) throw ConfigError("picard_max_iter", "must be >= 1");
  if (!(energy_tol > 0)) throw ConfigError("energy_tol", "must be positive");
  if (amplitudes.empty()) throw ConfigError("amplitudes", "empty list");
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (!(amplitudes[i] > 0)) throw ConfigError("amplitudes", "entries must be positive");
    if (i > 0 && !(amplitudes[i] > amplitudes[i - 1]))
      throw ConfigError("amplitudes", "must be strictly increasing");
  }
  if (samples < 1) throw ConfigError("samples", "must be >= 1");
  if (!(slope > 0)) throw ConfigError("slope", "must be positive");
  if (!(ceiling > 0)) throw ConfigError("ceiling", "must be positive");
  if (store_every < 1) throw ConfigError("store_every", "must be >= 1");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "N") {
    cfg.N = to_int<int>(key, value);
  } else if (key == "K") {
    cfg.K = to_int<int>(key, value);
  } else if (key == "dealias") {
    if (value == "two_thirds") cfg.dealias = Dealias::two_thirds;
    else if (value == "padded") cfg.dealias = Dealias::padded;
    else throw ConfigError(key, "expected two_thirds or padded");
  } else if (key == "dt") {
    cfg.dt = to_double(key, value);
  } else if (key == "horizon" || key == "T") {
    cfg.horizon = to_double(key, value);
  } else if (key == "mode") {
    if (value == "short") cfg.mode = HorizonMode::short_term;
    else if (value == "long") cfg.mode = HorizonMode::long_term;
    else throw ConfigError(key, "expected short or long");
  } else if (key == "solver") {
    if (value == "simulate") cfg.solver = SolverMode::simulate;
    else if (value == "hybrid") cfg.solver = SolverMode::hybrid;
    else throw ConfigError(key, "expected simulate or hybrid");
  } else if (key == "generator") {
    if (value == "random") cfg.generator = Generator::random;
    else if (value == "shear") cfg.generator = Generator::shear;
    else throw ConfigError(key, "expected random or shear");
  } else if (key == "c") {
    cfg.c = to_double(key, value);
  } else if (key == "picard_tol") {
    cfg.picard_tol = to_double(key, value);
  } else if (key == "picard_max_iter") {
    cfg.picard_max_iter = to_int<int>(key, value);
  } else if (key == "energy_tol") {
    cfg.energy_tol = to_double(key, value);
  } else if (key == "amplitudes") {
    cfg.amplitudes = to_list(key, value);
  } else if (key == "samples") {
    cfg.samples = to_int<int>(key, value);
  } else if (key == "seed") {
    cfg.seed = to_int<std::uint64_t>(key, value);
  } else if (key == "slope") {
    cfg.slope = to_double(key, value);
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "ceiling") {
    cfg.ceiling = to_double(key, value);
  } else if (key == "store_every") {
    cfg.store_every = to_int<int>(key, value);
  } else if (key == "threads") {
    cfg.threads = to_int<int>(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "line " + std::to_string(lineno) + " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + " has no key");
    if (value.empty()) throw ConfigError(key, "missing value");
    apply_setting(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["N"] = std::to_string(N);
  kv["K"] = std::to_string(grid().cutoff());
  kv["dealias"] = dealias == Dealias::two_thirds ? "two_thirds" : "padded";
  kv["dt"] = format_double(dt);
  kv["horizon"] = format_double(horizon);
  kv["mode"] = mode == HorizonMode::short_term ? "short" : "long";
  kv["solver"] = solver == SolverMode::simulate ? "simulate" : "hybrid";
  kv["generator"] = generator == Generator::random ? "random" : "shear";
  kv["c"] = format_double(c);
  kv["picard_tol"] = format_double(picard_tol);
  kv["picard_max_iter"] = std::to_string(picard_max_iter);
  kv["energy_tol"] = format_double(energy_tol);
  kv["amplitudes"] = join(amplitudes);
  kv["samples"] = std::to_string(samples);
  kv["seed"] = std::to_string(seed);
  kv["slope"] = format_double(slope);
  kv["ceiling"] = format_double(ceiling);
  kv["store_every"] = std::to_string(store_every);
  // out_dir and threads do not change results and stay out of the hash.
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : cfg.canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nstorus
