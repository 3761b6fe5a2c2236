#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "nstorus/spectral_field.hpp"

namespace nstorus {

/// Sampled norms along one solution. enstrophy is the squared H^1
/// seminorm, mean |grad u|^2, which on mean-zero fields equals h1^2.
struct NormSeries {
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> h1;
  std::vector<double> enstrophy;
  std::vector<double> div_linf;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }

  void push(double t, double l2_value, double h1_value, double enstrophy_value, double div) {
    times.push_back(t);
    l2.push_back(l2_value);
    h1.push_back(h1_value);
    enstrophy.push_back(enstrophy_value);
    div_linf.push_back(div);
  }

  template <typename Scalar>
  void record(double t, const SpectralField<Scalar>& f) {
    const auto& grid = f.grid();
    double l2_sq = 0;
    double grad_sq = 0;
    for (std::size_t j = 0; j < grid.mode_count(); ++j) {
      const int k2 = grid.wave(j).squaredNorm();
      if (k2 == 0) continue;
      const double a = static_cast<double>(f[j].squaredNorm());
      l2_sq += a;
      grad_sq += k2 * a;
    }
    push(t, std::sqrt(l2_sq), std::sqrt(grad_sq), grad_sq, static_cast<double>(divergence_linf(f)));
  }

  /// Throws std::invalid_argument when lengths differ, times are not
  /// strictly increasing, or a norm is negative.
  void validate() const;
};

/// 17 significant digits; parses back to the same double.
std::string format_double(double value);

/// CSV with header "t,l2,h1,enstrophy,div_linf".
void write_csv(std::ostream& out, const NormSeries& series);
NormSeries read_csv(std::istream& in);

}  // namespace nstorus
