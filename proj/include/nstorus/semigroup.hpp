#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nstorus/nonlinear.hpp"
#include "nstorus/norm_series.hpp"
#include "nstorus/spectral_field.hpp"

namespace nstorus {

enum class Scheme { if_rk4 };

/// Time stepping parameters. The stepper is stable for any dt, but
/// accuracy on the highest retained modes wants dt <= 1 / (2 K^2).
struct StepConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::if_rk4;
  int store_every = 1;
  double viscosity = 1.0;
  double h1_ceiling = 1e6;

  void validate() const {
    if (!(dt > 0)) throw std::invalid_argument("step: dt must be positive");
    if (store_every < 1) throw std::invalid_argument("step: store_every must be >= 1");
    if (!(viscosity > 0)) throw std::invalid_argument("step: viscosity must be positive");
    if (!(h1_ceiling > 0)) throw std::invalid_argument("step: h1 ceiling must be positive");
  }
};

/// One solution u(t): norms after every step, fields every store_every
/// steps plus the initial and final states.
template <typename Scalar>
struct Trajectory {
  GridSpec grid;
  std::vector<double> field_times;
  std::vector<SpectralField<Scalar>> fields;
  NormSeries norms;

  explicit Trajectory(const GridSpec& g) : grid(g) {}

  const SpectralField<Scalar>& final_field() const { return fields.back(); }
  double final_time() const { return norms.times.back(); }
};

/// Raised when a step produces a non-finite coefficient or the H^1 norm
/// passes the configured ceiling. Carries the last finite state and, when
/// thrown out of simulate, the trajectory up to that state.
template <typename Scalar>
class BlowupError : public std::runtime_error {
 public:
  BlowupError(const std::string& what, double time, SpectralField<Scalar> last_state)
      : std::runtime_error(what), time_(time), last_state_(std::move(last_state)),
        partial_(last_state_.grid()) {}

  double time() const { return time_; }
  const SpectralField<Scalar>& last_state() const { return last_state_; }
  const Trajectory<Scalar>& partial() const { return partial_; }
  void attach(Trajectory<Scalar> partial) { partial_ = std::move(partial); }

 private:
  double time_;
  SpectralField<Scalar> last_state_;
  Trajectory<Scalar> partial_;
};

/// e^{t nu Laplacian} f, exact mode by mode.
template <typename Scalar>
SpectralField<Scalar> heat_propagate(SpectralField<Scalar> f, double t, double viscosity = 1.0) {
  if (t < 0) throw std::invalid_argument("heat_propagate: negative time");
  if (t == 0) return f;
  const auto& grid = f.grid();
  for (std::size_t j = 0; j < grid.mode_count(); ++j) {
    const int k2 = grid.wave(j).squaredNorm();
    if (k2 == 0) continue;
    f[j] *= Scalar(std::exp(-viscosity * k2 * t));
  }
  return f;
}

/// t^{delta/2} ||e^{t Laplacian} f||_{H^{s+delta}} / ||f||_{H^s}.
/// Bounded by sup_x x^{delta/2} e^{-x} for every f.
template <typename Scalar>
Scalar smoothing_ratio(const SpectralField<Scalar>& f, Scalar s, Scalar delta, Scalar t) {
  if (!(t > 0)) throw std::invalid_argument("smoothing_ratio: t must be positive");
  if (!(delta > 0)) throw std::invalid_argument("smoothing_ratio: delta must be positive");
  const Scalar base = hs_norm(f, s);
  if (base == 0) throw std::invalid_argument("smoothing_ratio: zero field");
  return std::pow(t, delta / 2) * hs_norm(heat_propagate(f, double(t)), s + delta) / base;
}

/// Integrating-factor RK4 for du/dt = nu Laplacian u + D(u (x) u).
///
/// With v = e^{-t nu Laplacian} u the linear part is integrated exactly and
/// classical RK4 is applied to the transformed nonlinearity. Mode factors
/// are cached for the most recent step size.
template <typename Scalar>
class Stepper {
 public:
  Stepper(const GridSpec& grid, const StepConfig& cfg) : convection_(grid), cfg_(cfg) {
    cfg_.validate();
  }

  const StepConfig& config() const { return cfg_; }
  const GridSpec& grid() const { return convection_.grid(); }

  /// Advances u by dt. `t` is the time of u, only used to label blowups.
  SpectralField<Scalar> advance(const SpectralField<Scalar>& u, double dt, double t = 0) {
    prepare(dt);
    const Scalar h = Scalar(dt);
    const SpectralField<Scalar> a = convection_(u);

    SpectralField<Scalar> stage = u + (h / 2) * a;
    scale(stage, half_);
    const SpectralField<Scalar> b = convection_(stage);

    SpectralField<Scalar> eu = u;
    scale(eu, half_);
    stage = eu + (h / 2) * b;
    const SpectralField<Scalar> c = convection_(stage);

    scale(eu, half_);  // now e^{dt L} u
    SpectralField<Scalar> ec = c;
    scale(ec, half_);
    stage = eu + h * ec;
    const SpectralField<Scalar> d = convection_(stage);

    SpectralField<Scalar> ea = a;
    scale(ea, full_);
    SpectralField<Scalar> bc = b + c;
    scale(bc, half_);
    SpectralField<Scalar> next = eu + (h / 6) * (ea + Scalar(2) * bc + d);

    if (!all_finite(next))
      throw BlowupError<Scalar>("non-finite coefficient at t=" + std::to_string(t + dt), t + dt, u);
    if (double(hs_norm(next, Scalar(1))) > cfg_.h1_ceiling)
      throw BlowupError<Scalar>("H1 norm above ceiling at t=" + std::to_string(t + dt), t + dt, u);
    return next;
  }

  SpectralField<Scalar> advance(const SpectralField<Scalar>& u) { return advance(u, cfg_.dt); }

 private:
  void prepare(double dt) {
    if (dt == cached_dt_) return;
    if (!(dt > 0)) throw std::invalid_argument("step: dt must be positive");
    const auto& g = grid();
    full_.resize(g.mode_count());
    half_.resize(g.mode_count());
    for (std::size_t j = 0; j < g.mode_count(); ++j) {
      const double rate = cfg_.viscosity * g.wave(j).squaredNorm();
      full_[j] = Scalar(std::exp(-rate * dt));
      half_[j] = Scalar(std::exp(-rate * dt / 2));
    }
    cached_dt_ = dt;
  }

  static void scale(SpectralField<Scalar>& f, const std::vector<Scalar>& factors) {
    for (std::size_t j = 0; j < factors.size(); ++j) f[j] *= factors[j];
  }

  Convection<Scalar> convection_;
  StepConfig cfg_;
  double cached_dt_ = -1;
  std::vector<Scalar> full_;
  std::vector<Scalar> half_;
};

template <typename Scalar>
SpectralField<Scalar> step(const SpectralField<Scalar>& u, const StepConfig& cfg) {
  Stepper<Scalar> stepper(u.grid(), cfg);
  return stepper.advance(u, cfg.dt);
}

/// Step sizes and landing times covering [0, T]; the last step is
/// shortened so the final time is exactly T.
struct StepSchedule {
  std::vector<double> sizes;
  std::vector<double> times;
};

inline StepSchedule make_schedule(double horizon, double dt) {
  if (!(horizon > 0)) throw std::invalid_argument("simulate: horizon must be positive");
  if (!(dt > 0)) throw std::invalid_argument("simulate: dt must be positive");
  StepSchedule s;
  const double ratio = horizon / dt;
  const double whole = std::round(ratio);
  if (whole >= 1 && std::abs(ratio - whole) <= 1e-9 * std::max(1.0, whole)) {
    const auto n = static_cast<std::size_t>(whole);
    for (std::size_t j = 1; j <= n; ++j) {
      s.sizes.push_back(dt);
      s.times.push_back(j == n ? horizon : double(j) * dt);
    }
    return s;
  }
  const auto n = static_cast<std::size_t>(std::floor(ratio));
  for (std::size_t j = 1; j <= n; ++j) {
    s.sizes.push_back(dt);
    s.times.push_back(double(j) * dt);
  }
  s.sizes.push_back(horizon - double(n) * dt);
  s.times.push_back(horizon);
  return s;
}

/// Called with (t, u(t)) at t = 0 and after every accepted step.
template <typename Scalar>
using StepObserver = std::function<void(double, const SpectralField<Scalar>&)>;

template <typename Scalar>
void require_mean_zero(const SpectralField<Scalar>& u, const char* who) {
  if (!u.mean().isZero(0))
    throw std::invalid_argument(std::string(who) +
                                ": datum has a nonzero mean; apply galilean_reduce first");
}

/// Integrates from u0 to time T. On blowup the thrown BlowupError carries
/// the trajectory recorded so far.
template <typename Scalar>
Trajectory<Scalar> simulate(const SpectralField<Scalar>& u0, double horizon, const StepConfig& cfg,
                            const StepObserver<Scalar>& observer = {}) {
  require_mean_zero(u0, "simulate");
  const StepSchedule schedule = make_schedule(horizon, cfg.dt);
  Stepper<Scalar> stepper(u0.grid(), cfg);

  Trajectory<Scalar> traj(u0.grid());
  traj.norms.record(0.0, u0);
  traj.field_times.push_back(0.0);
  traj.fields.push_back(u0);
  if (observer) observer(0.0, u0);

  SpectralField<Scalar> u = u0;
  double t = 0;
  const std::size_t n = schedule.sizes.size();
  for (std::size_t j = 0; j < n; ++j) {
    try {
      u = stepper.advance(u, schedule.sizes[j], t);
    } catch (BlowupError<Scalar>& e) {
      if (traj.field_times.back() != t) {
        traj.field_times.push_back(t);
        traj.fields.push_back(u);
      }
      e.attach(std::move(traj));
      throw;
    }
    t = schedule.times[j];
    traj.norms.record(t, u);
    if ((j + 1) % static_cast<std::size_t>(cfg.store_every) == 0 || j + 1 == n) {
      traj.field_times.push_back(t);
      traj.fields.push_back(u);
    }
    if (observer) observer(t, u);
  }
  return traj;
}

/// Result of rescaling away a diffusion coefficient.
///
/// If u solves du/dt + (u.grad)u = nu^{-1} Laplacian u - grad p, then
/// w(t) = nu u(nu t) solves the unit-viscosity system with w(0) = field.
/// Read back with u(s) = w(s / time_scale) / time_scale.
template <typename Scalar>
struct ViscosityRescaling {
  SpectralField<Scalar> field;
  double time_scale;
};

template <typename Scalar>
ViscosityRescaling<Scalar> viscosity_normalize(const SpectralField<Scalar>& u0, double nu) {
  if (!(nu > 0)) throw std::invalid_argument("viscosity_normalize: nu must be positive");
  return {Scalar(nu) * u0, nu};
}

template <typename Scalar>
struct GalileanFrame {
  SpectralField<Scalar> field;
  Eigen::Vector3d drift;
};

/// Splits off the conserved mean velocity.
template <typename Scalar>
GalileanFrame<Scalar> galilean_reduce(const SpectralField<Scalar>& u0) {
  GalileanFrame<Scalar> frame{u0, u0.mean().template cast<double>()};
  frame.field[u0.grid().zero_index()].setZero();
  return frame;
}

/// Returns m + v(t, x - m t) from the mean-zero solution v(t) and drift m.
template <typename Scalar>
SpectralField<Scalar> galilean_restore(SpectralField<Scalar> v, const Eigen::Vector3d& drift,
                                       double t) {
  using Complex = std::complex<Scalar>;
  const auto& grid = v.grid();
  for (std::size_t j = 0; j < grid.mode_count(); ++j) {
    const WaveVector k = grid.wave(j);
    if (k.isZero()) continue;
    const double phase = -(k.cast<double>().dot(drift)) * t;
    v[j] *= Complex(Scalar(std::cos(phase)), Scalar(std::sin(phase)));
  }
  v[grid.zero_index()] = drift.cast<Scalar>().template cast<Complex>();
  return v;
}

}  // namespace nstorus
