#include "nstorus/verify.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "nstorus/diagnostics.hpp"
#include "nstorus/semigroup.hpp"

namespace nstorus {

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

Json VerifyReport::to_json() const {
  Json j;
  j["passed"] = passed();
  j["checks"] = Json::array();
  for (const CheckResult& c : checks)
    j["checks"].push_back(
        {{"name", c.name}, {"passed", c.passed}, {"value", number_json(c.value)}, {"limit", number_json(c.limit)}});
  return j;
}

namespace {

void add(VerifyReport& r, std::string name, double value, double limit) {
  r.checks.push_back({std::move(name), value <= limit, value, limit});
}

double max_divergence(const NormSeries& s) {
  return s.empty() ? 0.0 : *std::max_element(s.div_linf.begin(), s.div_linf.end());
}

}  // namespace

VerifyReport run_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  VerifyReport report;
  const GridSpec grid = cfg.grid();
  const double T = std::min(cfg.horizon, 1.0);
  StepConfig sc;
  sc.dt = cfg.dt;
  sc.store_every = INT_MAX;
  sc.h1_ceiling = cfg.ceiling;

  {
    const Field u0 = named_flow(FlowName::shear, 1.0, grid);
    const Trajectory<double> traj = simulate(u0, T, sc);
    double worst = 0;
    for (std::size_t i = 0; i < traj.norms.size(); ++i) {
      const double exact = std::exp(-traj.norms.times[i]) / std::sqrt(2.0);
      worst = std::max(worst, std::abs(traj.norms.h1[i] - exact) / exact);
    }
    add(report, "shear_h1_regression", worst, 1e-10);
  }
  {
    const Field u0 = named_flow(FlowName::taylor_green, 1.0, grid);
    const Trajectory<double> traj = simulate(u0, T, sc);
    const Field exact = std::exp(-2 * T) * u0;
    add(report, "taylor_green_regression",
        hs_norm(Field(traj.final_field() - exact), 1.0) / hs_norm(exact, 1.0), 1e-8);
    add(report, "taylor_green_divergence", max_divergence(traj.norms), 1e-10);
  }

  const Field u0 = random_divfree(1.0, cfg.seed, cfg.slope, grid);
  add(report, "projection_divergence", divergence_linf(u0), 1e-12);

  // Horizon split into two equal halves of whole steps.
  const long half_steps = std::max(1L, std::lround(T / (2 * cfg.dt)));
  const double half = double(half_steps) * cfg.dt;
  const Trajectory<double> whole = simulate(u0, 2 * half, sc);
  const NormSeries& norms = whole.norms;
  const double e0 = norms.l2.front() * norms.l2.front();
  add(report, "energy_identity", energy_identity_residual(norms).max(), cfg.energy_tol * e0);
  add(report, "energy_budget", energy_budget(norms).holds(norms) ? 0.0 : 1.0, 0.0);
  add(report, "poincare", poincare_holds(norms) ? 0.0 : 1.0, 0.0);
  add(report, "trajectory_divergence", max_divergence(norms), 1e-10);
  {
    const Field mid = simulate(u0, half, sc).final_field();
    const Field twice = simulate(mid, half, sc).final_field();
    add(report, "semigroup_law",
        hs_norm(Field(twice - whole.final_field()), 1.0) / hs_norm(whole.final_field(), 1.0), 1e-12);
  }
  {
    double worst = 0;
    for (double t : {0.01, 0.1, 0.5, 1.0}) {
      const double l2 = hs_norm(heat_propagate(u0, t), 0.0);
      worst = std::max(worst, l2 / (std::exp(-t) * hs_norm(u0, 0.0)) - 1.0);
    }
    add(report, "heat_decay", worst, 1e-12);
  }
  return report;
}

}  // namespace nstorus
