#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nstorus/semigroup.hpp"
#include "nstorus/spectral_field.hpp"

namespace nstorus {

/// Nodes 0 = t_0 < ... < t_M = T of the fixed-point solve.
class TimeGrid {
 public:
  static TimeGrid uniform(double horizon, int intervals);

  explicit TimeGrid(std::vector<double> nodes);

  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t intervals() const { return nodes_.size() - 1; }
  double horizon() const { return nodes_.back(); }
  double width(std::size_t interval) const { return nodes_[interval + 1] - nodes_[interval]; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  std::vector<double> nodes_;
};

/// Element of the discrete X^s_T space: one field per time node.
struct TrajectoryX {
  GridSpec grid;
  TimeGrid tgrid;
  std::vector<Field> fields;

  TrajectoryX(const GridSpec& g, TimeGrid t) : grid(g), tgrid(std::move(t)) {}

  friend TrajectoryX operator-(const TrajectoryX& a, const TrajectoryX& b);
};

/// sup_t ||u(t)||_{H^s} + (trapezoid int_0^T ||u(t)||_{H^{s+1}}^2 dt)^{1/2}
double xt_norm(const TrajectoryX& u, double s);

/// sup_t ||u(t) - v(t)||_{H^1} over the common nodes.
double c0_h1_distance(const TrajectoryX& u, const TrajectoryX& v);

/// c A^{-4}, capped at the unit horizon.
double local_time(double amplitude, double c);

/// Heat flow e^{t Laplacian} u0 sampled on the nodes.
TrajectoryX heat_trajectory(const Field& u0, const TimeGrid& tgrid);

/// Phi(u)(t) = e^{t Laplacian} u0 + int_0^t e^{(t-t') Laplacian} D(u(t') (x) u(t')) dt'.
///
/// The heat factor is applied exactly per mode; D(u (x) u) is interpolated
/// linearly in t' on each interval, giving a second-order quadrature.
TrajectoryX phi_map(const TrajectoryX& u, const Field& u0);

struct PicardOptions {
  double c = 0.01;
  double tol = 1e-10;
  int max_iter = 50;
  /// M = max(min_intervals, ceil(T / dt_hint))
  double dt_hint = 1e-3;
  int min_intervals = 64;
  /// Radius of the contraction ball in units of A; iterates leaving
  /// 10x this ball are flagged divergent.
  double ball_constant = 2.0;
  /// Halve c and retry on non-convergence.
  bool auto_shrink = false;
  int max_shrinks = 6;
};

struct PicardReport {
  int iterate_count = 0;
  std::vector<double> x1_norms;
  std::vector<double> diff_norms;
  std::vector<double> contraction_factors;
  bool converged = false;
  bool diverged = false;
  double T_used = 0;
  double c_used = 0;
  double A_measured = 0;
  /// xt_norm(u, 1) / A of the last iterate.
  double C_measured = 0;
  int shrinks = 0;
};

struct PicardResult {
  TrajectoryX solution;
  PicardReport report;
};

/// Fixed-point iteration of phi_map on [0, c A^{-4}] starting from the heat
/// flow of u0, stopping when the X^1_T norm of successive differences drops
/// to tol.
PicardResult picard_solve(const Field& u0, const PicardOptions& opts = {});

/// Same iteration from a caller-supplied first iterate; its time grid fixes
/// T and c is only recorded.
PicardResult picard_solve_from(const Field& u0, TrajectoryX initial, const PicardOptions& opts);

struct TailSample {
  double t;
  double ratio_h1;   ///< ||P_{|k|>K/2} u||_{H^1} / ||u||_{H^1}
  double ratio_h32;  ///< same at s = 3/2
};

/// High-frequency tail fractions per sample; zero fields report zeros.
std::vector<TailSample> tail_decay_profile(std::span<const double> times, std::span<const Field> fields);
std::vector<TailSample> tail_decay_profile(const TrajectoryX& u);

}  // namespace nstorus
