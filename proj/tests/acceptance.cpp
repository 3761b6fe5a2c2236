// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nstorus/commands.hpp"
#include "nstorus/diagnostics.hpp"
#include "nstorus/explorer.hpp"
#include "nstorus/nonlinear.hpp"
#include "nstorus/picard.hpp"
#include "nstorus/semigroup.hpp"
#include "oracles.hpp"

using namespace nstorus;
namespace fs = std::filesystem;

namespace tol {
constexpr double shear_h1 = 1e-10;
constexpr double taylor_green_h1 = 1e-8;
constexpr double energy = 1e-6;
constexpr double div_projected = 1e-12;
constexpr double div_trajectory = 1e-10;
constexpr double heat_equality = 1e-12;
constexpr double smoothing_bound = 0.4290 + 1e-6;
constexpr double contraction = 0.5;
constexpr double picard_vs_simulate = 1e-4;
constexpr double order_window = 0.3;
constexpr double oracle_relative = 1e-10;
constexpr double no_work = 1e-10;
constexpr double envelope_floor = 1e-6;
constexpr double envelope_factor = 3.0;
}  // namespace tol

namespace {

struct Line {
  int id;
  bool pass;
  std::string text;
};

std::vector<Line> lines;
double trajectory_divergence = 0;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void record(int id, bool pass, const std::string& text) {
  lines.push_back({id, pass, text});
  std::cerr << "  [" << id << "] " << (pass ? "pass" : "FAIL") << ": " << text << "\n";
}

void track(const NormSeries& s) {
  for (double d : s.div_linf) trajectory_divergence = std::max(trajectory_divergence, d);
}

void track(const Field& f) { trajectory_divergence = std::max(trajectory_divergence, divergence_linf(f)); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nstorus");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(int(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nstorus_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

void criterion_1() {
  const fs::path dir = scratch("shear");
  const int rc = cli({"simulate", "--flow", "shear", "--T", "1", "--dt", "1e-3", "--N", "16",
                      "--out-dir", dir.string()});
  std::ifstream in(dir / "norms.csv");
  const NormSeries s = read_csv(in);
  track(s);
  double worst = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double exact = std::exp(-s.times[i]) / std::sqrt(2.0);
    worst = std::max(worst, std::abs(s.h1[i] - exact) / exact);
  }
  const bool ok = rc == 0 && s.size() == 1001 && s.times.back() == 1.0 && worst <= tol::shear_h1;
  record(1, ok, "shear H1 series vs exp(-t)/sqrt2, " + std::to_string(s.size()) + " samples, max rel err " +
                    fmt("%.3e", worst) + " <= " + fmt("%.0e", tol::shear_h1));
}

void criterion_2() {
  const GridSpec g(16);
  const Field u0 = named_flow(FlowName::taylor_green, 1.0, g);
  StepConfig cfg;
  cfg.dt = 1e-3;
  const Trajectory<double> traj = simulate(u0, 1.0, cfg);
  track(traj.norms);
  const Field exact = std::exp(-2.0) * u0;
  const double err = hs_norm(Field(traj.final_field() - exact), 1.0) / hs_norm(exact, 1.0);
  record(2, err <= tol::taylor_green_h1,
         "Taylor-Green u(1) vs exp(-2) u0, rel H1 err " + fmt("%.3e", err) + " <= " + fmt("%.0e", tol::taylor_green_h1));
}

void criterion_3() {
  const GridSpec g(32);
  const Field u0 = random_divfree(1.0, 1, 2.0, g);
  StepConfig cfg;
  cfg.dt = 1e-3;
  cfg.store_every = 100;
  const Trajectory<double> traj = simulate(u0, 0.5, cfg);
  track(traj.norms);
  for (const Field& f : traj.fields) track(f);
  const double e0 = traj.norms.l2.front() * traj.norms.l2.front();
  const double worst = energy_identity_residual(traj.norms).max();
  record(3, worst <= tol::energy * e0,
         "energy identity N=32 T=0.5, max residual " + fmt("%.3e", worst) + " <= 1e-6 l2(0)^2 = " +
             fmt("%.3e", tol::energy * e0));
}

void criterion_5() {
  double worst_decay = -1, worst_equal = 0, worst_ratio = 0;
  for (int n : {8, 16, 32}) {
    const GridSpec g(n);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      for (double slope : {0.5, 2.0}) {
        const Field f = random_divfree(1.0, seed, slope, g);
        for (int i = 0; i <= 200; ++i) {
          const double t = std::pow(10.0, -4 + 4.0 * i / 200);
          const double ratio = hs_norm(heat_propagate(f, t), 0.0) / (std::exp(-t) * hs_norm(f, 0.0));
          worst_decay = std::max(worst_decay, ratio - 1);
          worst_ratio = std::max(worst_ratio, smoothing_ratio(f, 1.0, 1.0, t));
        }
      }
    }
    Field unit(g);
    unit.set_pair(WaveVector(0, 0, 1), Field::Vector(0.3, -0.8, 0));
    unit.set_pair(WaveVector(0, 1, 0), Field::Vector(std::complex<double>(0, 0.5), 0, 0));
    for (double t : {1e-4, 0.01, 0.3, 1.0, 2.0}) {
      const double l = hs_norm(heat_propagate(unit, t), 0.0);
      worst_equal = std::max(worst_equal, std::abs(l - std::exp(-t) * hs_norm(unit, 0.0)));
    }
  }
  const bool ok = worst_decay <= 1e-14 && worst_equal <= tol::heat_equality && worst_ratio <= tol::smoothing_bound;
  record(5, ok, "heat decay max(l2(t)/(e^-t l2(0)) - 1) " + fmt("%.2e", worst_decay) + ", |k|=1 equality err " +
                    fmt("%.2e", worst_equal) + ", max smoothing ratio " + fmt("%.6f", worst_ratio) +
                    " <= 0.429001");
}

// Observed convergence order from three successively halved resolutions.
double observed_order(const Field& coarse, const Field& mid, const Field& fine) {
  return std::log2(hs_norm(Field(coarse - mid), 1.0) / hs_norm(Field(mid - fine), 1.0));
}

void criterion_6() {
  const GridSpec g(16);
  const Field u0 = random_divfree(0.5, 1, 2.0, g);
  PicardOptions opts;
  opts.c = 0.01;
  opts.tol = 1e-10;
  const PicardResult r = picard_solve(u0, opts);
  double worst_q = 0;
  for (double q : r.report.contraction_factors) worst_q = std::max(worst_q, q);
  for (const Field& f : r.solution.fields) track(f);

  // simulate on the Picard nodes
  StepConfig cfg;
  cfg.dt = r.solution.tgrid.width(0);
  const Trajectory<double> sim = simulate(u0, r.report.T_used, cfg);
  track(sim.norms);
  double worst_node = 0;
  const bool aligned = sim.fields.size() == r.solution.fields.size();
  for (std::size_t i = 0; aligned && i < sim.fields.size(); ++i)
    worst_node = std::max(worst_node, hs_norm(Field(sim.fields[i] - r.solution.fields[i]), 1.0));

  // phi_map quadrature order: fixed points on M, 2M, 4M intervals
  std::vector<Field> ends;
  for (int m : {16, 32, 64}) {
    PicardOptions o = opts;
    o.min_intervals = m;
    o.dt_hint = 1.0;
    ends.push_back(picard_solve(u0, o).solution.fields.back());
  }
  const double phi_order = observed_order(ends[0], ends[1], ends[2]);

  // stepper order at larger amplitude, where the nonlinear error dominates
  const Field v0 = random_divfree(2.0, 1, 2.0, g);
  std::vector<Field> steps;
  for (double dt : {0.004, 0.002, 0.001}) {
    StepConfig c;
    c.dt = dt;
    steps.push_back(simulate(v0, 0.1, c).final_field());
  }
  const double rk_order = observed_order(steps[0], steps[1], steps[2]);

  const bool ok = r.report.converged && worst_q <= tol::contraction && aligned &&
                  worst_node <= tol::picard_vs_simulate && std::abs(phi_order - 2) <= tol::order_window &&
                  std::abs(rk_order - 4) <= tol::order_window;
  record(6, ok, std::string("Picard A=0.5 c=0.01 T=") + fmt("%.4g", r.report.T_used) +
                    (r.report.converged ? " converged" : " NOT converged") + " in " +
                    std::to_string(r.report.iterate_count) + " iterates, max factor " + fmt("%.3f", worst_q) +
                    ", per-node H1 vs simulate " + fmt("%.2e", worst_node) + ", phi_map order " +
                    fmt("%.2f", phi_order) + ", stepper order " + fmt("%.2f", rk_order));
}

void criterion_7() {
  double worst_rel = 0, worst_work = 0;
  int grids = 0;
  for (int n = 4; n <= 16; n += 2) {
    for (Dealias d : {Dealias::two_thirds, Dealias::padded}) {
      const GridSpec g(n, d);
      ++grids;
      for (std::uint64_t seed : {1u, 2u}) {
        const Field u = random_divfree(1.0, seed, 1.0, g);
        const Field fast = nonlinear_term(u);
        const Field slow = oracle::convection(u);
        worst_rel = std::max(worst_rel, hs_norm(Field(fast - slow), 0.0) / hs_norm(slow, 0.0));
        const double h1 = hs_norm(u, 1.0);
        worst_work = std::max(worst_work, std::abs(inner_product(fast, u)) / (h1 * h1 * h1));
      }
    }
  }
  record(7, worst_rel <= tol::oracle_relative && worst_work <= tol::no_work,
         "nonlinearity vs dense convolution on " + std::to_string(grids) + " grids N<=16, max rel err " +
             fmt("%.2e", worst_rel) + ", max |<N(u),u>|/h1^3 " + fmt("%.2e", worst_work));
}

void criterion_8() {
  const GridSpec g(32);
  CompactnessOptions opts;
  opts.dt = 1e-3;
  const CompactnessReport r = compactness_experiment(named_flow(FlowName::shear, 1.0, g), {2, 4, 8}, 0.1, 10.0, opts);
  bool decreasing = r.distances.size() == 3;
  for (std::size_t i = 1; i < r.distances.size(); ++i) decreasing = decreasing && r.distances[i] < r.distances[i - 1];
  std::string d;
  for (double x : r.distances) d += (d.empty() ? "" : ", ") + fmt("%.4e", x);
  record(8, decreasing, "compactness N=32 n={2,4,8} on [0.1," + fmt("%.3g", r.T_used) + "], sup H1 distances {" + d +
                            "} strictly decreasing");
}

void criterion_9() {
  ExperimentConfig cfg;
  cfg.N = 16;
  cfg.horizon = 1.0;
  cfg.dt = 1e-3;
  cfg.amplitudes = {0.1, 0.2, 0.3};
  cfg.samples = 8;
  const EnsembleSummary s = estimate_F(cfg);
  bool ok = true;
  int censored = 0;
  std::string vals;
  for (std::size_t j = 0; j < s.A.size(); ++j) {
    censored += s.censored[j];
    ok = ok && s.F_hat[j] >= s.A[j] - tol::envelope_floor && s.F_hat[j] <= tol::envelope_factor * s.A[j];
    if (j > 0) ok = ok && s.envelope[j] >= s.envelope[j - 1];
    vals += (vals.empty() ? "" : ", ") + fmt("%.6f", s.F_hat[j]);
  }
  ok = ok && censored == 0;
  record(9, ok, "F_hat(A) for A={0.1,0.2,0.3}, 8 samples: {" + vals + "}, in [A-1e-6, 3A], envelope non-decreasing, " +
                    std::to_string(censored) + " censored");
}

bool same_files(const fs::path& a, const fs::path& b, int& compared) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::size_t count_b = 0;
  for (const auto& e : fs::directory_iterator(b)) {
    (void)e;
    ++count_b;
  }
  if (names.size() != count_b || names.empty()) return false;
  for (const std::string& n : names) {
    ++compared;
    if (slurp(a / n) != slurp(b / n)) return false;
  }
  return true;
}

void criterion_10() {
  const std::vector<std::string> ens = {"ensemble", "--N", "16", "--T", "0.1", "--set", "samples=8", "--set",
                                        "amplitudes=0.1,0.2,0.3"};
  const std::vector<std::string> sim = {"simulate", "--N", "16", "--T", "0.2", "--store-every", "50"};
  const std::vector<std::string> com = {"compactness", "--N", "16", "--dt", "5e-3", "--flow", "shear", "--freqs", "1,2,4"};
  bool ok = true;
  int compared = 0;
  for (const auto& base : {ens, sim, com}) {
    const fs::path a = scratch(base[0] + "_a"), b = scratch(base[0] + "_b"), c = scratch(base[0] + "_c");
    auto with = [&](const fs::path& dir, const char* threads) {
      std::vector<std::string> args = base;
      args.insert(args.end(), {"--threads", threads, "--out-dir", dir.string()});
      return cli(args);
    };
    ok = ok && with(a, "1") == 0 && with(b, "1") == 0 && with(c, "8") == 0;
    ok = ok && same_files(a, b, compared) && same_files(a, c, compared);
  }
  record(10, ok, "ensemble, simulate and compactness outputs byte-identical across reruns and --threads 1/8 (" +
                     std::to_string(compared) + " file comparisons)");
}

void criterion_4() {
  double worst = 0;
  for (int n : {8, 16, 32}) {
    for (Dealias d : {Dealias::two_thirds, Dealias::padded}) {
      const GridSpec g(n, d);
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        worst = std::max(worst, divergence_linf(random_divfree(1.0, seed, 1.0, g)));
        Field raw(g);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        for (std::size_t j = 0; j < g.mode_count(); ++j)
          for (int c = 0; c < 3; ++c) raw[j][c] = {normal(rng), normal(rng)};
        worst = std::max(worst, divergence_linf(leray_project(raw)));
      }
    }
  }
  record(4, worst <= tol::div_projected && trajectory_divergence <= tol::div_trajectory,
         "divergence after projection " + fmt("%.2e", worst) + " <= 1e-12, along trajectories " +
             fmt("%.2e", trajectory_divergence) + " <= 1e-10");
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void()>>> suite = {
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {5, criterion_5}, {6, criterion_6},
      {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}, {4, criterion_4}};
  for (const auto& [id, run] : suite) {
    const auto start = std::chrono::steady_clock::now();
    try {
      run();
    } catch (const std::exception& e) {
      record(id, false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "  [" << id << "] " << fmt("%.1f", secs) << " s\n";
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
  int failed = 0;
  for (const Line& l : lines) {
    std::cout << (l.pass ? "PASS" : "FAIL") << " criterion " << l.id << ": " << l.text << "\n";
    failed += !l.pass;
  }
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all criteria passed")
            << "\n";
  return failed ? 1 : 0;
}
