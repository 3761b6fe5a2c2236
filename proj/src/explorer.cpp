#include "nstorus/explorer.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "nstorus/parallel.hpp"
#include "nstorus/semigroup.hpp"

#ifndef NSTORUS_VERSION
#define NSTORUS_VERSION "unknown"
#endif

namespace nstorus {

const char* code_version() { return NSTORUS_VERSION; }

Field make_datum(const ExperimentConfig& cfg, double amplitude, std::uint64_t seed) {
  const GridSpec grid = cfg.grid();
  if (cfg.generator == Generator::random) return random_divfree(amplitude, seed, cfg.slope, grid);
  Field f = named_flow(FlowName::shear, 1.0, grid);
  f *= amplitude / hs_norm(f, 1.0);
  return f;
}

namespace {

StepConfig step_config(const ExperimentConfig& cfg) {
  StepConfig sc;
  sc.dt = cfg.dt;
  sc.store_every = INT_MAX;  // only the norms are needed
  sc.h1_ceiling = cfg.ceiling;
  return sc;
}

void append_shifted(NormSeries& out, const NormSeries& in, double shift, bool skip_first) {
  for (std::size_t i = skip_first ? 1 : 0; i < in.size(); ++i)
    out.push(in.times[i] + shift, in.l2[i], in.h1[i], in.enstrophy[i], in.div_linf[i]);
}

}  // namespace

SampleRecord run_sample(const ExperimentConfig& cfg, double amplitude, std::uint64_t seed) {
  SampleRecord rec;
  rec.seed = seed;
  const Field u0 = make_datum(cfg, amplitude, seed);
  const StepConfig sc = step_config(cfg);

  NormSeries norms;
  Field start = u0;
  double t0 = 0;
  if (cfg.solver == SolverMode::hybrid) {
    PicardOptions po;
    po.c = cfg.c;
    po.tol = cfg.picard_tol;
    po.max_iter = cfg.picard_max_iter;
    po.dt_hint = cfg.dt;
    const PicardResult pr = picard_solve(u0, po);
    rec.picard_converged = pr.report.converged;
    if (pr.report.converged) {
      const auto& nodes = pr.solution.tgrid.nodes();
      std::size_t last = 0;
      for (std::size_t i = 0; i < nodes.size() && nodes[i] <= cfg.horizon; ++i) {
        norms.record(nodes[i], pr.solution.fields[i]);
        last = i;
      }
      start = pr.solution.fields[last];
      t0 = nodes[last];
    }
  }
  if (norms.empty()) norms.record(0.0, u0);

  const double remaining = cfg.horizon - t0;
  if (remaining > 1e-12 * cfg.horizon) {
    try {
      const Trajectory<double> traj = simulate(start, remaining, sc);
      append_shifted(norms, traj.norms, t0, true);
    } catch (const BlowupError<double>& e) {
      append_shifted(norms, e.partial().norms, t0, true);
      rec.censored = true;
      rec.censor_time = t0 + e.time();
    }
  }
  const ExplosionScan scan = norm_explosion_scan(norms, cfg.ceiling);
  if (scan.crossed && !rec.censored) {
    rec.censored = true;
    rec.censor_time = scan.time;
  }

  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms.h1[i] > rec.sup_h1) {
      rec.sup_h1 = norms.h1[i];
      rec.argmax_time = norms.times[i];
    }
  }
  rec.quadratic_constant = unit_time_contraction(norms).quadratic_constant;
  return rec;
}

std::vector<double> monotone_envelope(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

EnsembleSummary estimate_F(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t na = cfg.amplitudes.size();
  const std::size_t ns = static_cast<std::size_t>(cfg.samples);

  EnsembleSummary s;
  s.config_hash = config_hash(cfg);
  s.A = cfg.amplitudes;
  s.samples.assign(na, std::vector<SampleRecord>(ns));
  parallel_for(na * ns, cfg.threads, [&](std::size_t task) {
    const std::size_t j = task / ns;
    const std::size_t i = task % ns;
    s.samples[j][i] = run_sample(cfg, cfg.amplitudes[j], sample_seed(cfg.seed, j, i));
  });

  for (std::size_t j = 0; j < na; ++j) {
    double best = -1;
    std::uint64_t seed = 0;
    double time = std::numeric_limits<double>::quiet_NaN();
    int censored = 0;
    for (const SampleRecord& r : s.samples[j]) {
      if (r.censored) {
        ++censored;
        continue;
      }
      if (r.sup_h1 > best) {
        best = r.sup_h1;
        seed = r.seed;
        time = r.argmax_time;
      }
    }
    s.F_hat.push_back(best < 0 ? std::numeric_limits<double>::infinity() : best);
    s.censored.push_back(censored);
    s.argmax_seed.push_back(seed);
    s.argmax_time.push_back(time);
  }
  s.envelope = monotone_envelope(s.F_hat);
  return s;
}

namespace {

// sup over steps of ||v(t) - u(t)||_{H^1}, with its time.
std::pair<double, double> lockstep_sup(const Field& u0, const Field& v0, double horizon,
                                       const StepConfig& sc) {
  const StepSchedule schedule = make_schedule(horizon, sc.dt);
  Stepper<double> stepper(u0.grid(), sc);
  Field u = u0, v = v0;
  double best = hs_norm(Field(v - u), 1.0);
  double at = 0;
  double t = 0;
  for (std::size_t j = 0; j < schedule.sizes.size(); ++j) {
    u = stepper.advance(u, schedule.sizes[j], t);
    v = stepper.advance(v, schedule.sizes[j], t);
    t = schedule.times[j];
    const double d = hs_norm(Field(v - u), 1.0);
    if (d > best) {
      best = d;
      at = t;
    }
  }
  return {best, at};
}

}  // namespace

LipschitzProbe lipschitz_probe(const Field& u0, std::span<const double> deltas,
                               const ExperimentConfig& cfg, const Field& direction) {
  require_mean_zero(u0, "lipschitz_probe");
  if (direction.grid() != u0.grid()) throw std::invalid_argument("lipschitz_probe: grid mismatch");
  LipschitzProbe p;
  const double size = hs_norm(direction, 1.0);
  const StepConfig sc = step_config(cfg);
  for (double delta : deltas) {
    if (!(delta > 0)) throw std::invalid_argument("lipschitz_probe: deltas must be positive");
    p.deltas.push_back(delta);
    if (size == 0) {
      p.ratios.push_back(0.0);
      p.argmax_times.push_back(0.0);
      continue;
    }
    const Field v0 = u0 + (delta / size) * direction;
    const auto [sup, at] = lockstep_sup(u0, v0, cfg.horizon, sc);
    p.ratios.push_back(sup / delta);
    p.argmax_times.push_back(at);
  }
  if (!p.ratios.empty()) {
    const auto [lo, hi] = std::minmax_element(p.ratios.begin(), p.ratios.end());
    p.spread = *hi > 0 ? (*hi - *lo) / *hi : 0.0;
  }
  return p;
}

LipschitzProbe lipschitz_probe(const Field& u0, std::span<const double> deltas,
                               const ExperimentConfig& cfg) {
  return lipschitz_probe(u0, deltas, cfg, random_divfree(1.0, cfg.seed, cfg.slope, u0.grid()));
}

Json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  return x;
}

namespace {

Json numbers(std::span<const double> xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number_json(x));
  return a;
}

}  // namespace

Json to_json(const EnsembleSummary& s) {
  Json j;
  j["A"] = numbers(s.A);
  j["F_hat"] = numbers(s.F_hat);
  j["envelope"] = numbers(s.envelope);
  j["censored"] = s.censored;
  j["argmax_seed"] = Json::array();
  j["argmax_time"] = Json::array();
  for (std::size_t i = 0; i < s.A.size(); ++i) {
    const bool none = std::isinf(s.F_hat[i]);
    j["argmax_seed"].push_back(none ? Json(nullptr) : Json(s.argmax_seed[i]));
    j["argmax_time"].push_back(none ? Json(nullptr) : number_json(s.argmax_time[i]));
  }
  j["config_hash"] = s.config_hash;
  return j;
}

Json to_json(const PicardReport& r) {
  Json j;
  j["iterate_count"] = r.iterate_count;
  j["T_used"] = number_json(r.T_used);
  j["c_used"] = number_json(r.c_used);
  j["A_measured"] = number_json(r.A_measured);
  j["x1_norms"] = numbers(r.x1_norms);
  j["diff_norms"] = numbers(r.diff_norms);
  j["contraction_factors"] = numbers(r.contraction_factors);
  j["converged"] = r.converged;
  j["diverged"] = r.diverged;
  j["C_measured"] = number_json(r.C_measured);
  j["shrinks"] = r.shrinks;
  return j;
}

Json to_json(const CompactnessReport& r) {
  Json j;
  j["frequencies"] = r.frequencies;
  j["distances"] = numbers(r.distances);
  j["epsilon_window"] = number_json(r.epsilon_window);
  j["T_used"] = number_json(r.T_used);
  j["c_used"] = number_json(r.c_used);
  j["A_base"] = number_json(r.A_base);
  bool decreasing = true;
  for (std::size_t i = 1; i < r.distances.size(); ++i)
    decreasing = decreasing && r.distances[i] < r.distances[i - 1];
  j["strictly_decreasing"] = decreasing;
  return j;
}

Json to_json(const PigeonholeResult& r) {
  Json j;
  j["T_prime"] = number_json(r.T_prime);
  j["gradient_l2_at_T_prime"] = number_json(r.gradient_l2_at_T_prime);
  j["h1_at_T_prime"] = number_json(r.h1_at_T_prime);
  j["epsilon_used"] = number_json(r.epsilon_used);
  j["window"] = number_json(r.window);
  j["covered"] = number_json(r.covered);
  j["budget_bound"] = number_json(r.budget_bound);
  j["partial"] = r.partial;
  j["poincare_consistent"] = r.poincare_consistent;
  j["mean_value_bound_holds"] = r.mean_value_bound_holds();
  return j;
}

Json to_json(const LipschitzProbe& p) {
  Json j;
  j["deltas"] = numbers(p.deltas);
  j["ratios"] = numbers(p.ratios);
  j["argmax_times"] = numbers(p.argmax_times);
  j["spread"] = number_json(p.spread);
  j["stabilized"] = p.stabilized();
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_residual_csv(std::ostream& out, const ResidualSeries& r) {
  out << "t,residual\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    out << format_double(r.times[i]) << ',' << format_double(r.residual[i]) << '\n';
}

void write_samples_csv(std::ostream& out, const std::vector<SampleRecord>& samples) {
  out << "seed,sup_h1,argmax_time,censored,censor_time,picard_converged,quadratic_constant\n";
  for (const SampleRecord& r : samples)
    out << r.seed << ',' << format_double(r.sup_h1) << ',' << format_double(r.argmax_time) << ','
        << int(r.censored) << ',' << format_double(r.censor_time) << ',' << int(r.picard_converged)
        << ',' << format_double(r.quadratic_constant) << '\n';
}

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["seeds"] = seeds;
  j["files"] = files;
  return j;
}

RunManifest write_ensemble(const std::filesystem::path& dir, const EnsembleSummary& s) {
  std::filesystem::create_directories(dir);
  RunManifest m{"ensemble", s.config_hash, code_version(), {}, {}};
  write_json(dir / "summary.json", to_json(s));
  m.files.push_back("summary.json");
  for (std::size_t j = 0; j < s.samples.size(); ++j) {
    const std::string name = "samples_A" + std::to_string(j) + ".csv";
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    write_samples_csv(out, s.samples[j]);
    m.files.push_back(name);
    for (const SampleRecord& r : s.samples[j]) m.seeds.push_back(r.seed);
  }
  write_json(dir / "manifest.json", m.to_json());
  return m;
}

}  // namespace nstorus
