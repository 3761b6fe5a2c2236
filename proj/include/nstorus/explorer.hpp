#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nstorus/config.hpp"
#include "nstorus/diagnostics.hpp"
#include "nstorus/norm_series.hpp"
#include "nstorus/picard.hpp"
#include "nstorus/spectral_field.hpp"

namespace nstorus {

/// Seed of sample i at amplitude index j.
constexpr std::uint64_t sample_seed(std::uint64_t base, std::size_t j, std::size_t i) {
  return base + std::uint64_t(j) * 1000000u + std::uint64_t(i);
}

/// Initial datum with ||u0||_{H^1} = amplitude for the configured generator.
Field make_datum(const ExperimentConfig& cfg, double amplitude, std::uint64_t seed);

struct SampleRecord {
  std::uint64_t seed = 0;
  double sup_h1 = 0;
  double argmax_time = 0;
  bool censored = false;
  double censor_time = 0;
  bool picard_converged = false;  ///< hybrid mode only
  double quadratic_constant = 0;  ///< from unit_time_contraction
};

/// Solves one sample to the horizon and records sup_t h1.
SampleRecord run_sample(const ExperimentConfig& cfg, double amplitude, std::uint64_t seed);

struct EnsembleSummary {
  std::vector<double> A;
  std::vector<double> F_hat;  ///< +inf when every sample at A is censored
  std::vector<double> envelope;
  std::vector<int> censored;
  std::vector<std::uint64_t> argmax_seed;
  std::vector<double> argmax_time;
  std::vector<std::vector<SampleRecord>> samples;  ///< [A index][sample index]
  std::string config_hash;
};

/// Running maximum.
std::vector<double> monotone_envelope(std::span<const double> values);

/// Empirical F(A) over the configured amplitude grid. Samples run as
/// independent tasks on cfg.threads workers and are merged in index order,
/// so the result does not depend on the thread count.
EnsembleSummary estimate_F(const ExperimentConfig& cfg);

struct LipschitzProbe {
  std::vector<double> deltas;
  std::vector<double> ratios;  ///< sup_t ||u'(t) - u(t)||_{H^1} / delta
  std::vector<double> argmax_times;
  double spread = 0;  ///< (max - min) / max over ratios, 0 when all vanish
  bool stabilized() const { return spread <= 0.2; }
};

/// Perturbs u0 by delta * direction / ||direction||_{H^1}.
LipschitzProbe lipschitz_probe(const Field& u0, std::span<const double> deltas,
                               const ExperimentConfig& cfg, const Field& direction);
/// Uses a fixed random direction drawn from cfg.seed.
LipschitzProbe lipschitz_probe(const Field& u0, std::span<const double> deltas,
                               const ExperimentConfig& cfg);

using Json = nlohmann::ordered_json;

/// Non-finite values export as the strings "+inf", "-inf" and "nan".
Json number_json(double x);

Json to_json(const EnsembleSummary& s);
Json to_json(const PicardReport& r);
Json to_json(const CompactnessReport& r);
Json to_json(const PigeonholeResult& r);
Json to_json(const LipschitzProbe& p);

void write_json(const std::filesystem::path& path, const Json& j);
void write_residual_csv(std::ostream& out, const ResidualSeries& r);
void write_samples_csv(std::ostream& out, const std::vector<SampleRecord>& samples);

/// Files written by one subcommand plus what produced them.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string version;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> files;  ///< relative to the output directory

  Json to_json() const;
};

/// Writes summary.json, samples_A<j>.csv and manifest.json under dir.
RunManifest write_ensemble(const std::filesystem::path& dir, const EnsembleSummary& s);

const char* code_version();

}  // namespace nstorus
