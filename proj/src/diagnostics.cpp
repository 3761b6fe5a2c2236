#include "nstorus/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nstorus/parallel.hpp"
#include "nstorus/picard.hpp"
#include "nstorus/semigroup.hpp"

namespace nstorus {

namespace {

// Integral over [t_i, t_{i+1}] of the cubic through four neighbouring
// samples, by 3-point Gauss-Legendre (exact for cubics).
double cubic_interval(const std::vector<double>& t, const std::vector<double>& y, std::size_t i) {
  const std::size_t n = t.size();
  if (n < 4) return 0.5 * (y[i] + y[i + 1]) * (t[i + 1] - t[i]);
  const std::size_t first = std::min(i > 0 ? i - 1 : 0, n - 4);
  const double a = t[i], b = t[i + 1];
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double node = std::sqrt(0.6);
  const double gx[3] = {mid - half * node, mid, mid + half * node};
  const double gw[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
  double sum = 0;
  for (int g = 0; g < 3; ++g) {
    double p = 0;
    for (std::size_t j = first; j < first + 4; ++j) {
      double basis = 1;
      for (std::size_t m = first; m < first + 4; ++m)
        if (m != j) basis *= (gx[g] - t[m]) / (t[j] - t[m]);
      p += basis * y[j];
    }
    sum += gw[g] * p;
  }
  return sum * half;
}

}  // namespace

ResidualSeries energy_identity_residual(const NormSeries& series) {
  ResidualSeries out;
  double worst = 0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double change = series.l2[i] * series.l2[i] - series.l2[i - 1] * series.l2[i - 1];
    const double dissipation = 2 * cubic_interval(series.times, series.enstrophy, i - 1);
    const double r = std::abs(change + dissipation);
    worst = std::max(worst, r);
    out.times.push_back(series.times[i]);
    out.residual.push_back(r);
    out.running_max.push_back(worst);
  }
  return out;
}

double energy_tolerance(const NormSeries& series) {
  const double e0 = series.empty() ? 0.0 : series.l2.front() * series.l2.front();
  return 1e-6 * std::max(1.0, e0);
}

EnergyBudget energy_budget(const NormSeries& series) {
  EnergyBudget b;
  double integral = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    b.sup_l2 = std::max(b.sup_l2, series.l2[i]);
    if (i > 0)
      integral += 0.5 * (series.enstrophy[i] + series.enstrophy[i - 1]) *
                  (series.times[i] - series.times[i - 1]);
  }
  b.dissipation_total = std::sqrt(2 * integral);
  return b;
}

bool EnergyBudget::holds(const NormSeries& series, double tol) const {
  const double l0 = series.empty() ? 0.0 : series.l2.front();
  return sup_l2 <= l0 * (1 + tol) && dissipation_total <= l0 * (1 + tol);
}

bool PigeonholeResult::mean_value_bound_holds() const {
  return gradient_l2_at_T_prime * gradient_l2_at_T_prime * covered <= budget_bound;
}

PigeonholeResult pigeonhole_time(const NormSeries& series, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("pigeonhole_time: eps must be positive");
  if (series.empty()) throw std::invalid_argument("pigeonhole_time: empty series");
  PigeonholeResult r;
  r.epsilon_used = eps;
  r.window = 1.0 / (eps * eps);

  std::size_t best = 0;
  std::size_t last = 0;
  double integral = 0;
  for (std::size_t i = 0; i < series.size() && series.times[i] <= r.window; ++i) {
    if (series.enstrophy[i] < series.enstrophy[best]) best = i;
    if (i > 0)
      integral += 0.5 * (series.enstrophy[i] + series.enstrophy[i - 1]) *
                  (series.times[i] - series.times[i - 1]);
    last = i;
  }
  r.T_prime = series.times[best];
  r.gradient_l2_at_T_prime = std::sqrt(series.enstrophy[best]);
  r.h1_at_T_prime = series.h1[best];
  r.covered = series.times[last] - series.times.front();
  r.budget_bound = integral;
  r.partial = series.times[last] < r.window * (1 - 1e-12);
  const double h1_sq = r.h1_at_T_prime * r.h1_at_T_prime;
  const double l2_sq = series.l2[best] * series.l2[best];
  r.poincare_consistent = h1_sq <= 2 * (l2_sq + series.enstrophy[best]) * (1 + 1e-12) &&
                          l2_sq <= series.enstrophy[best] * (1 + 1e-12);
  return r;
}

double decay_envelope(const NormSeries& series, double t_start) {
  std::vector<double> t, y;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.times[i] < t_start) continue;
    if (!(series.h1[i] > 0)) throw std::invalid_argument("decay_envelope: h1 vanishes in window");
    t.push_back(series.times[i]);
    y.push_back(std::log(series.h1[i]));
  }
  if (t.size() < 4) throw std::invalid_argument("decay_envelope: fewer than 4 samples in window");
  const double n = double(t.size());
  double tm = 0, ym = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tm += t[i];
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - tm) * (y[i] - ym);
    sxx += (t[i] - tm) * (t[i] - tm);
  }
  return sxy / sxx;
}

namespace {

// h1 at time t by linear interpolation between samples.
double h1_at(const NormSeries& s, double t) {
  const auto it = std::lower_bound(s.times.begin(), s.times.end(), t - 1e-12);
  if (it == s.times.end()) throw std::out_of_range("time beyond series");
  const auto i = static_cast<std::size_t>(it - s.times.begin());
  if (i == 0 || std::abs(s.times[i] - t) <= 1e-12) return s.h1[i];
  const double w = (t - s.times[i - 1]) / (s.times[i] - s.times[i - 1]);
  return (1 - w) * s.h1[i - 1] + w * s.h1[i];
}

}  // namespace

UnitContraction unit_time_contraction(const NormSeries& series) {
  UnitContraction out;
  if (series.empty()) return out;
  const double end = series.times.back();
  for (int t = 0; double(t) + 1 <= end + 1e-12; ++t) {
    const double a = h1_at(series, t);
    const double b = h1_at(series, std::min(double(t + 1), end));
    out.times.push_back(t);
    out.h1_start.push_back(a);
    out.ratios.push_back(a > 0 ? b / a : 0.0);
    if (a > 0) out.quadratic_constant = std::max(out.quadratic_constant, (b - std::exp(-1.0) * a) / (a * a));
  }
  return out;
}

bool UnitContraction::holds_below(double threshold) const {
  for (std::size_t i = 0; i < ratios.size(); ++i)
    if (h1_start[i] <= threshold && ratios[i] > 1.0) return false;
  return true;
}

double default_epsilon(const NormSeries& series) {
  const double e = series.empty() ? 0.0 : series.h1.front();
  return 0.2 * std::min(1.0, e > 0 ? 1.0 / e : 1.0);
}

Field weak_null_perturbation(const GridSpec& grid, int n, double size) {
  if (n < 1 || n > grid.cutoff())
    throw std::invalid_argument("perturbation frequency " + std::to_string(n) +
                                " outside the retained cutoff " + std::to_string(grid.cutoff()));
  Field w(grid);
  Field::Vector v = Field::Vector::Zero();
  const double amplitude = size * std::sqrt(2.0) / n;
  v[1] = {0.0, -amplitude / 2};  // amplitude sin(n x1) in component 2
  w.set_pair(WaveVector(n, 0, 0), v);
  return w;
}

namespace {

// Lockstep solves of the base datum and each perturbed datum.
std::vector<double> lockstep_distances(const Field& base, const std::vector<Field>& perturbed,
                                       double horizon, double window, const StepConfig& cfg) {
  const StepSchedule schedule = make_schedule(horizon, cfg.dt);
  Stepper<double> stepper(base.grid(), cfg);
  Field u = base;
  std::vector<Field> v = perturbed;
  std::vector<double> worst(v.size(), 0.0);
  auto observe = [&](double t) {
    if (t < window - 1e-12) return;
    for (std::size_t n = 0; n < v.size(); ++n)
      worst[n] = std::max(worst[n], hs_norm(Field(v[n] - u), 1.0));
  };
  observe(0.0);
  double t = 0;
  for (std::size_t j = 0; j < schedule.sizes.size(); ++j) {
    u = stepper.advance(u, schedule.sizes[j], t);
    for (auto& f : v) f = stepper.advance(f, schedule.sizes[j], t);
    t = schedule.times[j];
    observe(t);
  }
  return worst;
}

}  // namespace

CompactnessReport compactness_experiment(const Field& u0, const std::vector<int>& freqs,
                                         double eps_window, double c,
                                         const CompactnessOptions& opts,
                                         double perturbation_size) {
  require_mean_zero(u0, "compactness_experiment");
  for (std::size_t i = 1; i < freqs.size(); ++i)
    if (freqs[i] <= freqs[i - 1])
      throw std::invalid_argument("compactness_experiment: frequencies must increase strictly");

  CompactnessReport report;
  report.frequencies = freqs;
  report.epsilon_window = eps_window;
  report.c_used = c;
  report.A_base = hs_norm(u0, 1.0);
  report.T_used = local_time(report.A_base + 1.0, c);
  if (eps_window > report.T_used)
    throw std::invalid_argument("compactness_experiment: window start beyond the local time " +
                                std::to_string(report.T_used));

  std::vector<Field> perturbed;
  for (int n : freqs) perturbed.push_back(u0 + weak_null_perturbation(u0.grid(), n, perturbation_size));

  StepConfig cfg;
  cfg.dt = opts.dt;
  cfg.viscosity = opts.viscosity;

  if (opts.threads <= 1) {
    report.distances = lockstep_distances(u0, perturbed, report.T_used, eps_window, cfg);
    return report;
  }
  // Each task pairs one perturbation with its own copy of the base solve.
  report.distances.assign(freqs.size(), 0.0);
  parallel_for(freqs.size(), opts.threads, [&](std::size_t n) {
    report.distances[n] =
        lockstep_distances(u0, {perturbed[n]}, report.T_used, eps_window, cfg).front();
  });
  return report;
}

ExplosionScan norm_explosion_scan(const NormSeries& series, double ceiling) {
  ExplosionScan scan;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.h1[i] > ceiling || !std::isfinite(series.h1[i])) {
      scan.crossed = true;
      scan.index = i;
      scan.time = series.times[i];
      break;
    }
  }
  return scan;
}

bool poincare_holds(const NormSeries& series) {
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series.l2[i] * series.l2[i] > series.enstrophy[i] * (1 + 1e-12) + 1e-300) return false;
  return true;
}

}  // namespace nstorus
