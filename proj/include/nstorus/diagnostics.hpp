#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nstorus/norm_series.hpp"
#include "nstorus/spectral_field.hpp"

namespace nstorus {

/// Per-interval defect of d/dt ||u||_2^2 = -2 ||grad u||_2^2, with the
/// dissipation integrated by local cubic interpolation of the enstrophy
/// samples (trapezoid below four samples).
struct ResidualSeries {
  std::vector<double> times;  ///< right end of each interval
  std::vector<double> residual;
  std::vector<double> running_max;

  double max() const { return running_max.empty() ? 0.0 : running_max.back(); }
};

ResidualSeries energy_identity_residual(const NormSeries& series);

/// Default tolerance for the energy identity: 1e-6 max(1, l2(0)^2).
double energy_tolerance(const NormSeries& series);

struct EnergyBudget {
  double sup_l2 = 0;
  double dissipation_total = 0;  ///< (2 int enstrophy dt)^{1/2}

  /// sup_l2 <= l2(0)(1 + tol) and dissipation_total <= l2(0)(1 + tol)
  bool holds(const NormSeries& series, double tol = 1e-6) const;
};

EnergyBudget energy_budget(const NormSeries& series);

struct PigeonholeResult {
  double T_prime = 0;
  double gradient_l2_at_T_prime = 0;  ///< enstrophy(T')^{1/2}
  double h1_at_T_prime = 0;
  double epsilon_used = 0;
  double window = 0;          ///< 1 / eps^2
  double covered = 0;         ///< length of [0, window] present in the series
  double budget_bound = 0;    ///< trapezoid int_0^covered enstrophy dt
  bool partial = false;       ///< series ends before the window does
  bool poincare_consistent = false;

  /// enstrophy(T') * covered <= budget_bound
  bool mean_value_bound_holds() const;
};

/// Earliest sample in [0, 1/eps^2] minimising the enstrophy.
PigeonholeResult pigeonhole_time(const NormSeries& series, double eps);

/// Least-squares slope of log h1(t) on [t_start, end].
double decay_envelope(const NormSeries& series, double t_start);

struct UnitContraction {
  std::vector<double> times;   ///< t = 0, 1, 2, ... with t + 1 in range
  std::vector<double> ratios;  ///< h1(t + 1) / h1(t), 0 when h1(t) = 0
  std::vector<double> h1_start;
  /// max over t of (h1(t+1) - e^{-1} h1(t)) / h1(t)^2, the measured C_E
  double quadratic_constant = 0;

  /// ratios <= 1 wherever h1(t) <= threshold
  bool holds_below(double threshold) const;
};

UnitContraction unit_time_contraction(const NormSeries& series);

/// Default smallness threshold 0.2 min(1, 1/E), E = h1(0).
double default_epsilon(const NormSeries& series);

struct CompactnessOptions {
  double dt = 1e-3;
  double viscosity = 1.0;
  int threads = 1;
};

struct CompactnessReport {
  std::vector<int> frequencies;
  std::vector<double> distances;  ///< sup_{[eps, T]} ||u_n(t) - u(t)||_{H^1}
  double epsilon_window = 0;
  double T_used = 0;
  double c_used = 0;
  double A_base = 0;
};

/// Unit-H^1 divergence-free perturbation sqrt(2)/n sin(n x1) e2, a family
/// of fixed size converging weakly to zero as n grows.
Field weak_null_perturbation(const GridSpec& grid, int n, double size = 1.0);

/// Solves from u0 and from u0 + w_n on [0, local_time(A + 1, c)] and
/// records the C^0 H^1 distance on [eps_window, T], checked after every step.
CompactnessReport compactness_experiment(const Field& u0, const std::vector<int>& freqs,
                                         double eps_window, double c,
                                         const CompactnessOptions& opts = {},
                                         double perturbation_size = 1.0);

struct ExplosionScan {
  bool crossed = false;
  std::size_t index = 0;
  double time = 0;
};

ExplosionScan norm_explosion_scan(const NormSeries& series, double ceiling);

/// ||u||_{L^2} <= ||grad u||_{L^2} on every sample, with relative slack 1e-12.
bool poincare_holds(const NormSeries& series);

}  // namespace nstorus
