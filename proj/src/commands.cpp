#include "nstorus/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "nstorus/config.hpp"
#include "nstorus/diagnostics.hpp"
#include "nstorus/explorer.hpp"
#include "nstorus/picard.hpp"
#include "nstorus/semigroup.hpp"
#include "nstorus/snapshot.hpp"
#include "nstorus/verify.hpp"

namespace fs = std::filesystem;

namespace nstorus {
namespace {

struct GlobalOptions {
  std::string config_path;
  std::string seed;
  std::string out_dir;
  std::string threads;
  std::vector<std::string> sets;
};

// Flags that map onto config keys; empty strings are not applied.
struct Overrides {
  std::map<std::string, std::string> values;

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option(flag, values[key], help);
  }
};

ExperimentConfig assemble(const GlobalOptions& g, const Overrides& o) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  for (const std::string& s : g.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(s, "--set expects key=value");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [key, value] : o.values)
    if (!value.empty()) apply_setting(cfg, key, value);
  if (!g.seed.empty()) apply_setting(cfg, "seed", g.seed);
  if (!g.out_dir.empty()) apply_setting(cfg, "out_dir", g.out_dir);
  if (!g.threads.empty()) apply_setting(cfg, "threads", g.threads);
  cfg.validate();
  return cfg;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

Field initial_field(const ExperimentConfig& cfg, const std::string& flow, double amplitude) {
  if (flow == "random") return random_divfree(amplitude, cfg.seed, cfg.slope, cfg.grid());
  return named_flow(flow, amplitude, cfg.grid());
}

std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%05zu.nsf", i);
  return buf;
}

// Norms, residuals, pigeonhole and snapshots of one trajectory.
void write_trajectory(const fs::path& dir, const Trajectory<double>& traj, RunManifest& m) {
  {
    std::ofstream out(dir / "norms.csv", std::ios::binary);
    write_csv(out, traj.norms);
    m.files.push_back("norms.csv");
  }
  {
    std::ofstream out(dir / "residual.csv", std::ios::binary);
    write_residual_csv(out, energy_identity_residual(traj.norms));
    m.files.push_back("residual.csv");
  }
  write_json(dir / "pigeonhole.json", to_json(pigeonhole_time(traj.norms, default_epsilon(traj.norms))));
  m.files.push_back("pigeonhole.json");
  Json times = Json::array();
  for (std::size_t i = 0; i < traj.fields.size(); ++i) {
    write_snapshot(dir / snapshot_name(i), traj.fields[i]);
    m.files.push_back(snapshot_name(i));
    times.push_back(traj.field_times[i]);
  }
  Json index;
  index["snapshot_times"] = times;
  write_json(dir / "snapshots.json", index);
  m.files.push_back("snapshots.json");
}

void finish(const fs::path& dir, const RunManifest& m, bool blowup = false) {
  Json j = m.to_json();
  if (blowup) j["blowup"] = true;
  write_json(dir / "manifest.json", j);
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& flow, double amplitude) {
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  RunManifest m{"simulate", config_hash(cfg), code_version(), {cfg.seed}, {}};
  const Field u0 = initial_field(cfg, flow, amplitude);
  StepConfig sc;
  sc.dt = cfg.dt;
  sc.store_every = cfg.store_every;
  sc.h1_ceiling = cfg.ceiling;
  try {
    write_trajectory(dir, simulate(u0, cfg.horizon, sc), m);
  } catch (const BlowupError<double>& e) {
    write_trajectory(dir, e.partial(), m);
    finish(dir, m, true);
    std::cerr << "blowup: " << e.what() << "; partial outputs in " << dir.string() << "\n";
    return exit_blowup;
  }
  finish(dir, m);
  return exit_ok;
}

int cmd_picard(const ExperimentConfig& cfg, const std::string& flow, double amplitude, bool shrink) {
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  PicardOptions po;
  po.c = cfg.c;
  po.tol = cfg.picard_tol;
  po.max_iter = cfg.picard_max_iter;
  po.dt_hint = cfg.dt;
  po.auto_shrink = shrink;
  const PicardResult r = picard_solve(initial_field(cfg, flow, amplitude), po);
  Json j = to_json(r.report);
  Json tail = Json::array();
  for (const TailSample& s : tail_decay_profile(r.solution))
    tail.push_back({{"t", s.t}, {"ratio_h1", s.ratio_h1}, {"ratio_h32", s.ratio_h32}});
  j["tail_decay"] = tail;
  write_json(dir / "picard.json", j);
  RunManifest m{"picard", config_hash(cfg), code_version(), {cfg.seed}, {"picard.json"}};
  finish(dir, m);
  if (!r.report.converged) std::cerr << "picard: no convergence after " << r.report.iterate_count << " iterates\n";
  return exit_ok;
}

int cmd_verify(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  const VerifyReport r = run_verify(cfg);
  for (const CheckResult& c : r.checks)
    std::cout << (c.passed ? "ok   " : "FAIL ") << c.name << "  " << c.value << " <= " << c.limit << "\n";
  write_json(dir / "verify.json", r.to_json());
  finish(dir, {"verify", config_hash(cfg), code_version(), {cfg.seed}, {"verify.json"}});
  return r.passed() ? exit_ok : exit_check_failed;
}

int cmd_ensemble(const ExperimentConfig& cfg) {
  const EnsembleSummary s = estimate_F(cfg);
  write_ensemble(cfg.out_dir, s);
  for (std::size_t j = 0; j < s.A.size(); ++j) {
    if (s.censored[j] > 0)
      std::cerr << "warning: " << s.censored[j] << " censored samples at A=" << s.A[j] << "\n";
  }
  return exit_ok;
}

int cmd_compactness(const ExperimentConfig& cfg, const std::string& flow, double amplitude,
                    const std::string& freqs, double window, double c) {
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  CompactnessOptions opts;
  opts.dt = cfg.dt;
  opts.threads = cfg.threads;
  const CompactnessReport r =
      compactness_experiment(initial_field(cfg, flow, amplitude), parse_ints(freqs), window, c, opts);
  write_json(dir / "compactness.json", to_json(r));
  finish(dir, {"compactness", config_hash(cfg), code_version(), {cfg.seed}, {"compactness.json"}});
  return exit_ok;
}

int cmd_lipschitz(const ExperimentConfig& cfg, const std::string& flow, double amplitude,
                  const std::string& deltas) {
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  const std::vector<double> d = parse_doubles(deltas);
  const LipschitzProbe p = lipschitz_probe(initial_field(cfg, flow, amplitude), d, cfg);
  write_json(dir / "lipschitz.json", to_json(p));
  finish(dir, {"lipschitz", config_hash(cfg), code_version(), {cfg.seed}, {"lipschitz.json"}});
  return exit_ok;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral Navier-Stokes on the 3-torus"};
  app.set_version_flag("--version", std::string(code_version()));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key=value configuration file");
  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--threads", g.threads, "worker threads");
  app.add_option("--set", g.sets, "extra key=value setting, repeatable");

  Overrides o;
  std::string flow = "random";
  double amplitude = 1.0;
  bool shrink = false;
  std::string freqs = "2,4,8";
  double window = 0.1;
  double compact_c = 10.0;
  std::string deltas = "1e-2,1e-3,1e-4";

  auto* sim = app.add_subcommand("simulate", "one trajectory; NSF1 snapshots and CSV norms");
  auto* pic = app.add_subcommand("picard", "fixed-point iteration of the mild formulation");
  auto* ver = app.add_subcommand("verify", "invariant suite; exit 1 on any failure");
  auto* ens = app.add_subcommand("ensemble", "empirical F(A) over the amplitude grid");
  auto* com = app.add_subcommand("compactness", "weakly vanishing perturbations of a base datum");
  auto* lip = app.add_subcommand("lipschitz", "Lipschitz constant of the solution map");

  for (auto* sub : {sim, pic, ver, ens, com, lip}) {
    o.bind(sub, "--N", "N", "grid resolution");
    o.bind(sub, "--dt", "dt", "time step");
    o.bind(sub, "--T", "horizon", "time horizon");
  }
  for (auto* sub : {sim, pic, com, lip}) {
    sub->add_option("--flow", flow, "shear, taylor-green, abc or random");
    sub->add_option("--amplitude", amplitude, "flow amplitude; H1 norm for random data");
  }
  sim->add_option("--store-every", o.values["store_every"], "steps between snapshots");
  pic->add_option("--c", o.values["c"], "local time constant");
  pic->add_flag("--auto-shrink", shrink, "halve c until convergence");
  com->add_option("--freqs", freqs, "comma separated perturbation frequencies");
  com->add_option("--window", window, "start of the distance window");
  com->add_option("--c", compact_c, "local time constant of the base solve");
  lip->add_option("--deltas", deltas, "comma separated perturbation sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    const ExperimentConfig cfg = assemble(g, o);
    if (*sim) return cmd_simulate(cfg, flow, amplitude);
    if (*pic) return cmd_picard(cfg, flow, amplitude, shrink);
    if (*ver) return cmd_verify(cfg);
    if (*ens) return cmd_ensemble(cfg);
    if (*com) return cmd_compactness(cfg, flow, amplitude, freqs, window, compact_c);
    if (*lip) return cmd_lipschitz(cfg, flow, amplitude, deltas);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const BlowupError<double>& e) {
    std::cerr << "blowup: " << e.what() << "\n";
    return exit_blowup;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_check_failed;
  }
  return exit_usage;
}

}  // namespace nstorus
