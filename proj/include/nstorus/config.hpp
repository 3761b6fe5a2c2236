#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nstorus/grid.hpp"

namespace nstorus {

/// Malformed configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class HorizonMode { short_term, long_term };
enum class SolverMode { simulate, hybrid };
enum class Generator { random, shear };

/// Everything an experiment depends on. Parsed from flat "key = value"
/// text; '#' starts a comment. See docs/config.md for the key list.
struct ExperimentConfig {
  int N = 16;
  int K = 0;  ///< 0 selects the default cutoff for the dealias mode
  Dealias dealias = Dealias::two_thirds;
  double dt = 1e-3;
  double horizon = 1.0;
  HorizonMode mode = HorizonMode::short_term;
  SolverMode solver = SolverMode::simulate;
  Generator generator = Generator::random;
  double c = 0.01;
  double picard_tol = 1e-10;
  int picard_max_iter = 50;
  double energy_tol = 1e-6;
  std::vector<double> amplitudes = {0.1, 0.2, 0.3};
  int samples = 8;
  std::uint64_t seed = 1;
  double slope = 2.0;
  std::string out_dir = "out";
  double ceiling = 1e6;
  int store_every = 100;
  int threads = 1;

  GridSpec grid() const;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;

  /// Sorted key=value lines; the input of config_hash.
  std::string canonical() const;
};

/// Parses key=value text on top of defaults; unknown keys are errors.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Applies one key=value pair.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// FNV-1a 64 of canonical(), as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace nstorus
