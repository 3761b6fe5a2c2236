#include <doctest.h>

#include <cmath>

#include "nstorus/semigroup.hpp"
#include "oracles.hpp"

using namespace nstorus;

namespace {

Field unit_pair(const GridSpec& g) {
  Field f(g);
  f.set_pair(WaveVector(1, 0, 0), Field::Vector(0, 1, 0));
  return f;
}

}  // namespace

TEST_CASE("heat_propagate examples") {
  const GridSpec g(8);
  const Field f = random_divfree(1.0, 1, 2.0, g);
  CHECK(heat_propagate(f, 0.0) == f);
  const Field e = heat_propagate(unit_pair(g), 1.0);
  CHECK(std::abs(e.at(WaveVector(1, 0, 0))[1] - std::exp(-1.0)) <= 1e-16);
  CHECK_THROWS_AS(heat_propagate(f, -1e-3), std::invalid_argument);
}

TEST_CASE("heat semigroup law and decay") {
  const GridSpec g(12);
  const Field f = random_divfree(1.0, 2, 1.0, g);
  const Field a = heat_propagate(heat_propagate(f, 0.3), 0.45);
  const Field b = heat_propagate(f, 0.75);
  CHECK(oracle::max_abs_diff(a, b) <= 1e-14);
  for (double t : {1e-3, 0.1, 1.0, 3.0}) {
    CHECK(hs_norm(heat_propagate(f, t), 0.0) <= std::exp(-t) * hs_norm(f, 0.0) * (1 + 1e-14));
    const Field p = unit_pair(g);
    CHECK(std::abs(hs_norm(heat_propagate(p, t), 0.0) - std::exp(-t) * hs_norm(p, 0.0)) <= 1e-12);
  }
}

TEST_CASE("smoothing_ratio") {
  const GridSpec g(16);
  CHECK(smoothing_ratio(unit_pair(g), 1.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  const double bound = std::sqrt(0.5) * std::exp(-0.5);
  const Field f = random_divfree(1.0, 3, 1.0, g);
  for (int i = 0; i <= 80; ++i) {
    const double t = std::pow(10.0, -4 + 4.0 * i / 80);
    CHECK(smoothing_ratio(f, 1.0, 1.0, t) <= bound + 1e-12);
    CHECK(smoothing_ratio(f, 1.0, 1e-9, t) <= 1 + 1e-12);
  }
  CHECK_THROWS_AS(smoothing_ratio(Field(g), 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(smoothing_ratio(f, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("simulate reproduces the shear solution") {
  const GridSpec g(16);
  StepConfig cfg;
  cfg.store_every = 250;
  const Trajectory<double> traj = simulate(named_flow(FlowName::shear, 1.0, g), 1.0, cfg);
  REQUIRE(traj.norms.size() == 1001);
  for (std::size_t i = 0; i < traj.norms.size(); ++i) {
    const double exact = std::exp(-traj.norms.times[i]) / std::sqrt(2.0);
    CHECK(std::abs(traj.norms.h1[i] - exact) <= 1e-10 * exact);
  }
  CHECK(traj.field_times == std::vector<double>{0, 0.25, 0.5, 0.75, 1.0});
  CHECK(traj.final_time() == 1.0);
}

TEST_CASE("zero data stay zero") {
  const GridSpec g(8);
  const Trajectory<double> traj = simulate(Field(g), 0.1, StepConfig{});
  for (double h : traj.norms.h1) CHECK(h == 0.0);
}

TEST_CASE("trajectory invariants on random data") {
  const GridSpec g(12);
  StepConfig cfg;
  cfg.dt = 2e-3;
  cfg.store_every = 10;
  const Field u0 = random_divfree(1.5, 4, 2.0, g);
  const Trajectory<double> traj = simulate(u0, 0.2, cfg);
  traj.norms.validate();
  for (std::size_t i = 0; i < traj.fields.size(); ++i) {
    const Field& f = traj.fields[i];
    CHECK(f.mean().norm() == 0.0);
    CHECK(divergence_linf(f) <= 1e-10);
    const auto it = std::find(traj.norms.times.begin(), traj.norms.times.end(), traj.field_times[i]);
    REQUIRE(it != traj.norms.times.end());
    const std::size_t j = std::size_t(it - traj.norms.times.begin());
    CHECK(std::abs(hs_norm(f, 1.0) - traj.norms.h1[j]) <= 1e-12 * traj.norms.h1[j]);
  }
  for (std::size_t i = 1; i < traj.norms.size(); ++i)
    CHECK(traj.norms.l2[i] <= traj.norms.l2[i - 1] + 1e-10 * cfg.dt);
}

TEST_CASE("schedule lands on the horizon") {
  const StepSchedule s = make_schedule(1.0, 1e-3);
  CHECK(s.sizes.size() == 1000);
  CHECK(s.times.back() == 1.0);
  const StepSchedule r = make_schedule(0.0105, 1e-3);
  CHECK(r.sizes.size() == 11);
  CHECK(r.sizes.back() == doctest::Approx(5e-4).epsilon(1e-9));
  CHECK(r.times.back() == 0.0105);
  CHECK_THROWS_AS(make_schedule(-1.0, 1e-3), std::invalid_argument);
}

TEST_CASE("step config validation") {
  StepConfig cfg;
  cfg.dt = 0;
  CHECK_THROWS_AS(simulate(Field(GridSpec(8)), 1.0, cfg), std::invalid_argument);
  cfg.dt = 1e-3;
  cfg.store_every = 0;
  CHECK_THROWS_AS(simulate(Field(GridSpec(8)), 1.0, cfg), std::invalid_argument);
}

TEST_CASE("blowup carries the partial trajectory") {
  const GridSpec g(8);
  StepConfig cfg;
  cfg.h1_ceiling = 0.45;  // below the initial norm, so the first step trips it
  const Field u0 = random_divfree(0.49, 1, 2.0, g);
  try {
    simulate(u0, 1.0, cfg);
    FAIL("expected blowup");
  } catch (const BlowupError<double>& e) {
    CHECK(e.partial().norms.size() >= 1);
    CHECK(e.last_state() == e.partial().final_field());
    CHECK(e.time() > 0);
  }
}

TEST_CASE("viscosity normalization") {
  const GridSpec g(16);
  const Field u0 = named_flow(FlowName::shear, 1.0, g);
  const ViscosityRescaling<double> id = viscosity_normalize(u0, 1.0);
  CHECK(id.field == u0);
  CHECK(id.time_scale == 1.0);
  CHECK_THROWS_AS(viscosity_normalize(u0, 0.0), std::invalid_argument);

  // u solves the system with diffusion 1/nu; w(t) = nu u(nu t).
  const double nu = 2.0;
  const ViscosityRescaling<double> w = viscosity_normalize(u0, nu);
  CHECK(hs_norm(w.field, 1.0) == doctest::Approx(2 * hs_norm(u0, 1.0)).epsilon(1e-15));
  StepConfig slow;
  slow.viscosity = 1 / nu;
  const Field u1 = simulate(u0, 1.0, slow).final_field();
  const Field w_half = simulate(w.field, 0.5, StepConfig{}).final_field();
  const Field expect = nu * u1;
  CHECK(hs_norm(Field(w_half - expect), 1.0) <= 1e-9 * hs_norm(expect, 1.0));
}

TEST_CASE("Galilean reduction") {
  const GridSpec g(16);
  const Field u0 = named_flow(FlowName::shear, 1.0, g);
  const GalileanFrame<double> same = galilean_reduce(u0);
  CHECK(same.field == u0);
  CHECK(same.drift.norm() == 0.0);

  Field constant(g);
  constant[g.zero_index()] = Field::Vector(0.7, 0, 0);
  const GalileanFrame<double> c = galilean_reduce(constant);
  CHECK(oracle::max_abs(c.field) == 0.0);
  CHECK(c.drift == Eigen::Vector3d(0.7, 0, 0));

  // Shear with a cross-stream mean drift: u(t,x) = m + e^{-t} (sin(x2 - m2 t), 0, 0).
  Field drifting = u0;
  drifting[g.zero_index()] = Field::Vector(0.1, 0.4, -0.3);
  const GalileanFrame<double> f = galilean_reduce(drifting);
  const double t = 0.5;
  const Field v = simulate(f.field, t, StepConfig{}).final_field();
  const Field restored = galilean_restore(v, f.drift, t);
  double worst = 0, scale = 0;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      const double x1 = 0.3 + a, x2 = 1.1 * b, x3 = 0.2 * a * b;
      const oracle::PointValue pv = oracle::evaluate(restored, x1, x2, x3);
      const double exact[3] = {0.1 + std::exp(-t) * std::sin(x2 - 0.4 * t), 0.4, -0.3};
      for (int i = 0; i < 3; ++i) {
        worst = std::max(worst, std::abs(pv.u[i] - exact[i]));
        scale = std::max(scale, std::abs(exact[i]));
      }
    }
  CHECK(worst <= 1e-9 * scale);
}
