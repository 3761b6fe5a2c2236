#include "nstorus/picard.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nstorus/nonlinear.hpp"

namespace nstorus {
namespace {

// (1 - e^{-z}(1 + z)) / z^2, the weight of the left node in the exponential
// trapezoid rule. Series below z = 0.5 avoids cancellation.
double left_weight(double z) {
  if (z < 0.5) {
    double term = 0.5;  // n = 0 term of sum (-1)^n (n+1) z^n / (n+2)!
    double sum = term;
    for (int n = 1; n < 30; ++n) {
      term *= -z * double(n + 1) / (double(n) * double(n + 2));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (1.0 - std::exp(-z) * (1.0 + z)) / (z * z);
}

// (1 - e^{-z}) / z
double phi1(double z) {
  if (z < 1e-8) return 1.0 - z / 2;
  return -std::expm1(-z) / z;
}

void require_same_nodes(const TrajectoryX& a, const TrajectoryX& b) {
  if (a.grid != b.grid || !(a.tgrid == b.tgrid) || a.fields.size() != b.fields.size())
    throw std::invalid_argument("trajectories live on different grids");
}

}  // namespace

TimeGrid TimeGrid::uniform(double horizon, int intervals) {
  if (!(horizon > 0)) throw std::invalid_argument("time grid: horizon must be positive");
  if (intervals < 8) throw std::invalid_argument("time grid: need at least 8 intervals");
  std::vector<double> nodes(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) nodes[i] = horizon * double(i) / double(intervals);
  nodes.back() = horizon;
  return TimeGrid(std::move(nodes));
}

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 9) throw std::invalid_argument("time grid: need at least 8 intervals");
  if (nodes_.front() != 0.0) throw std::invalid_argument("time grid: first node must be 0");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw std::invalid_argument("time grid: nodes must be strictly increasing");
}

TrajectoryX operator-(const TrajectoryX& a, const TrajectoryX& b) {
  require_same_nodes(a, b);
  TrajectoryX out(a.grid, a.tgrid);
  out.fields.reserve(a.fields.size());
  for (std::size_t i = 0; i < a.fields.size(); ++i) out.fields.push_back(a.fields[i] - b.fields[i]);
  return out;
}

double xt_norm(const TrajectoryX& u, double s) {
  if (u.fields.empty()) return 0;
  if (u.fields.size() != u.tgrid.size())
    throw std::invalid_argument("xt_norm: one field per node required");
  double sup = 0;
  double integral = 0;
  double prev = 0;
  for (std::size_t i = 0; i < u.fields.size(); ++i) {
    sup = std::max(sup, hs_norm(u.fields[i], s));
    const double upper = hs_norm(u.fields[i], s + 1);
    const double sq = upper * upper;
    if (i > 0) integral += 0.5 * (prev + sq) * u.tgrid.width(i - 1);
    prev = sq;
  }
  return sup + std::sqrt(integral);
}

double c0_h1_distance(const TrajectoryX& u, const TrajectoryX& v) {
  require_same_nodes(u, v);
  double worst = 0;
  for (std::size_t i = 0; i < u.fields.size(); ++i)
    worst = std::max(worst, hs_norm(Field(u.fields[i] - v.fields[i]), 1.0));
  return worst;
}

double local_time(double amplitude, double c) {
  if (!(c > 0)) throw std::invalid_argument("local_time: c must be positive");
  if (amplitude < 0) throw std::invalid_argument("local_time: negative amplitude");
  if (amplitude == 0) return 1.0;
  return std::min(1.0, c / std::pow(amplitude, 4));
}

TrajectoryX heat_trajectory(const Field& u0, const TimeGrid& tgrid) {
  TrajectoryX out(u0.grid(), tgrid);
  out.fields.reserve(tgrid.size());
  for (double t : tgrid.nodes()) out.fields.push_back(heat_propagate(u0, t));
  return out;
}

TrajectoryX phi_map(const TrajectoryX& u, const Field& u0) {
  if (u.grid != u0.grid()) throw std::invalid_argument("phi_map: grid mismatch between u and u0");
  if (u.fields.size() != u.tgrid.size())
    throw std::invalid_argument("phi_map: u must be defined on every node");
  require_mean_zero(u0, "phi_map");

  const GridSpec& grid = u.grid;
  Convection<double> convection(grid);
  std::vector<Field> forcing;
  forcing.reserve(u.fields.size());
  for (const Field& f : u.fields) forcing.push_back(convection(f));

  // Duhamel integral I(t_n), advanced interval by interval:
  //   I(t_{n+1}) = e^{-|k|^2 h} I(t_n) + h (w0 N_n + w1 N_{n+1})
  TrajectoryX out(grid, u.tgrid);
  out.fields.reserve(u.fields.size());
  out.fields.push_back(u0);
  Field integral(grid);
  const std::size_t modes = grid.mode_count();
  std::vector<double> decay(modes), w_left(modes), w_right(modes);
  for (std::size_t n = 0; n + 1 < u.fields.size(); ++n) {
    const double h = u.tgrid.width(n);
    for (std::size_t j = 0; j < modes; ++j) {
      const double z = grid.wave(j).squaredNorm() * h;
      decay[j] = std::exp(-z);
      w_left[j] = h * left_weight(z);
      w_right[j] = h * phi1(z) - w_left[j];
    }
    const Field& left = forcing[n];
    const Field& right = forcing[n + 1];
    for (std::size_t j = 0; j < modes; ++j)
      integral[j] = decay[j] * integral[j] + w_left[j] * left[j] + w_right[j] * right[j];
    out.fields.push_back(heat_propagate(u0, u.tgrid.nodes()[n + 1]) + integral);
  }
  return out;
}

namespace {

PicardResult iterate(const Field& u0, TrajectoryX current, const PicardOptions& opts,
                     double amplitude, double c) {
  PicardReport report;
  report.A_measured = amplitude;
  report.c_used = c;
  report.T_used = current.tgrid.horizon();
  report.x1_norms.push_back(xt_norm(current, 1.0));
  report.iterate_count = 1;
  const double ball = opts.ball_constant * std::max(amplitude, 1e-300);

  for (int it = 0; it < opts.max_iter; ++it) {
    TrajectoryX next = phi_map(current, u0);
    const double diff = xt_norm(next - current, 1.0);
    const double norm = xt_norm(next, 1.0);
    report.x1_norms.push_back(norm);
    report.diff_norms.push_back(diff);
    report.iterate_count += 1;
    const std::size_t nd = report.diff_norms.size();
    if (nd >= 2) {
      const double prev = report.diff_norms[nd - 2];
      report.contraction_factors.push_back(prev > 0 ? diff / prev : 0.0);
    }
    current = std::move(next);
    if (!std::isfinite(norm) || norm > 10 * ball ||
        (nd >= 2 && diff > opts.tol && diff > 2 * report.diff_norms[nd - 2])) {
      report.diverged = true;
      break;
    }
    if (diff <= opts.tol) {
      report.converged = true;
      break;
    }
  }
  report.C_measured = amplitude > 0 ? report.x1_norms.back() / amplitude : 0.0;
  return {std::move(current), std::move(report)};
}

TimeGrid picard_grid(double horizon, const PicardOptions& opts) {
  const int m = std::max(opts.min_intervals,
                         static_cast<int>(std::ceil(horizon / opts.dt_hint - 1e-9)));
  return TimeGrid::uniform(horizon, m);
}

}  // namespace

PicardResult picard_solve(const Field& u0, const PicardOptions& opts) {
  if (!(opts.tol > 0)) throw std::invalid_argument("picard_solve: tol must be positive");
  if (opts.max_iter < 1) throw std::invalid_argument("picard_solve: max_iter must be >= 1");
  require_mean_zero(u0, "picard_solve");
  if (divergence_linf(u0) > divergence_tolerance(u0))
    throw std::invalid_argument("picard_solve: datum is not divergence-free");

  const double amplitude = hs_norm(u0, 1.0);
  double c = opts.c;
  const int attempts = opts.auto_shrink ? opts.max_shrinks + 1 : 1;
  PicardResult result{TrajectoryX(u0.grid(), TimeGrid::uniform(1.0, 8)), {}};
  for (int attempt = 0; attempt < attempts; ++attempt) {
    const TimeGrid tgrid = picard_grid(local_time(amplitude, c), opts);
    result = iterate(u0, heat_trajectory(u0, tgrid), opts, amplitude, c);
    result.report.shrinks = attempt;
    if (result.report.converged) break;
    c /= 2;
  }
  return result;
}

PicardResult picard_solve_from(const Field& u0, TrajectoryX initial, const PicardOptions& opts) {
  if (initial.grid != u0.grid()) throw std::invalid_argument("picard_solve: grid mismatch");
  return iterate(u0, std::move(initial), opts, hs_norm(u0, 1.0), opts.c);
}

std::vector<TailSample> tail_decay_profile(std::span<const double> times,
                                           std::span<const Field> fields) {
  if (times.size() != fields.size())
    throw std::invalid_argument("tail_decay_profile: one time per field required");
  std::vector<TailSample> out;
  out.reserve(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const Field& f = fields[i];
    const double radius = f.grid().cutoff() / 2.0;
    TailSample s{times[i], 0.0, 0.0};
    const double total1 = hs_norm(f, 1.0);
    const double total32 = hs_norm(f, 1.5);
    if (total1 > 0) s.ratio_h1 = hs_tail_norm(f, 1.0, radius) / total1;
    if (total32 > 0) s.ratio_h32 = hs_tail_norm(f, 1.5, radius) / total32;
    out.push_back(s);
  }
  return out;
}

std::vector<TailSample> tail_decay_profile(const TrajectoryX& u) {
  return tail_decay_profile(u.tgrid.nodes(), u.fields);
}

}  // namespace nstorus
