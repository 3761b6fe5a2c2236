#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "nstorus/grid.hpp"

namespace nstorus {

/// Truncated Fourier coefficients of a real vector field on the torus.
///
/// Column j of coefficients() holds the complex 3-vector u^(k) for the
/// wave vector grid().wave(j). The representation is
///   u(x) = sum_k u^(k) exp(i k.x),   u^(k) = mean_x u(x) exp(-i k.x),
/// so the H^0 norm is the root-mean-square of u over the unit-mass torus.
template <typename Scalar>
class SpectralField {
 public:
  using RealScalar = Scalar;
  using Complex = std::complex<Scalar>;
  using Coefficients = Eigen::Matrix<Complex, 3, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Complex, 3, 1>;

  explicit SpectralField(const GridSpec& grid)
      : grid_(grid), coef_(Coefficients::Zero(3, static_cast<Eigen::Index>(grid.mode_count()))) {}

  const GridSpec& grid() const { return grid_; }
  Coefficients& coefficients() { return coef_; }
  const Coefficients& coefficients() const { return coef_; }
  Eigen::Index size() const { return coef_.cols(); }

  auto operator[](std::size_t idx) { return coef_.col(static_cast<Eigen::Index>(idx)); }
  auto operator[](std::size_t idx) const { return coef_.col(static_cast<Eigen::Index>(idx)); }

  Vector at(const WaveVector& k) const {
    if (!grid_.contains(k)) return Vector::Zero();
    return coef_.col(static_cast<Eigen::Index>(grid_.index(k)));
  }

  /// Writes v at k and conj(v) at -k so the field stays real.
  void set_pair(const WaveVector& k, const Vector& v) {
    require_contains(k);
    coef_.col(static_cast<Eigen::Index>(grid_.index(k))) = v;
    coef_.col(static_cast<Eigen::Index>(grid_.index(-k))) = v.conjugate();
  }

  void add_pair(const WaveVector& k, const Vector& v) {
    require_contains(k);
    if (k.isZero()) {
      coef_.col(static_cast<Eigen::Index>(grid_.zero_index())) += v.real().template cast<Complex>();
      return;
    }
    coef_.col(static_cast<Eigen::Index>(grid_.index(k))) += v;
    coef_.col(static_cast<Eigen::Index>(grid_.index(-k))) += v.conjugate();
  }

  /// Spatial mean (the k = 0 coefficient).
  Eigen::Matrix<Scalar, 3, 1> mean() const {
    return coef_.col(static_cast<Eigen::Index>(grid_.zero_index())).real();
  }

  template <typename Other>
  SpectralField<Other> cast() const {
    SpectralField<Other> out(grid_);
    out.coefficients() = coef_.template cast<std::complex<Other>>();
    return out;
  }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(o);
    coef_ += o.coef_;
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same_grid(o);
    coef_ -= o.coef_;
    return *this;
  }
  SpectralField& operator*=(Scalar a) {
    coef_ *= a;
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Scalar s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, Scalar s) { return a *= s; }

  friend bool operator==(const SpectralField& a, const SpectralField& b) {
    return a.grid_ == b.grid_ && a.coef_ == b.coef_;
  }

  void require_same_grid(const SpectralField& o) const {
    if (o.grid_ != grid_) throw std::invalid_argument("spectral fields live on different grids");
  }

 private:
  void require_contains(const WaveVector& k) const {
    if (!grid_.contains(k))
      throw std::out_of_range("wave vector outside the retained mode cube");
  }

  GridSpec grid_;
  Coefficients coef_;
};

using Field = SpectralField<double>;

/// Homogeneous Sobolev norm (sum_{k != 0} |k|^{2s} |u^(k)|^2)^{1/2}.
template <typename Scalar>
Scalar hs_norm(const SpectralField<Scalar>& f, Scalar s) {
  const auto& grid = f.grid();
  Scalar sum = 0;
  for (std::size_t j = 0; j < grid.mode_count(); ++j) {
    const int k2 = grid.wave(j).squaredNorm();
    if (k2 == 0) continue;
    const Scalar w = s == 0 ? Scalar(1) : std::pow(Scalar(k2), s);
    sum += w * f[j].squaredNorm();
  }
  return std::sqrt(sum);
}

/// Sobolev norm restricted to modes with |k| > radius.
template <typename Scalar>
Scalar hs_tail_norm(const SpectralField<Scalar>& f, Scalar s, Scalar radius) {
  const auto& grid = f.grid();
  Scalar sum = 0;
  for (std::size_t j = 0; j < grid.mode_count(); ++j) {
    const int k2 = grid.wave(j).squaredNorm();
    if (k2 == 0 || Scalar(k2) <= radius * radius) continue;
    sum += std::pow(Scalar(k2), s) * f[j].squaredNorm();
  }
  return std::sqrt(sum);
}

/// Real L^2 inner product <f, g> over the unit-mass torus.
template <typename Scalar>
Scalar inner_product(const SpectralField<Scalar>& f, const SpectralField<Scalar>& g) {
  f.require_same_grid(g);
  Scalar sum = 0;
  for (Eigen::Index j = 0; j < f.size(); ++j)
    sum += f.coefficients().col(j).dot(g.coefficients().col(j)).real();
  return sum;
}

/// Applies I - k k^T / |k|^2 mode-wise and pins the mean to zero.
template <typename Scalar>
SpectralField<Scalar> leray_project(SpectralField<Scalar> f) {
  using Complex = std::complex<Scalar>;
  const auto& grid = f.grid();
  for (std::size_t j = 0; j < grid.mode_count(); ++j) {
    const WaveVector k = grid.wave(j);
    const int k2 = k.squaredNorm();
    auto c = f[j];
    if (k2 == 0) {
      c.setZero();
      continue;
    }
    const Eigen::Matrix<Scalar, 3, 1> kv = k.cast<Scalar>();
    const Complex kdotc = kv.template cast<Complex>().dot(c);
    c -= (kdotc / Scalar(k2)) * kv.template cast<Complex>();
  }
  return f;
}

/// max_k |k . u^(k)|
template <typename Scalar>
Scalar divergence_linf(const SpectralField<Scalar>& f) {
  using Complex = std::complex<Scalar>;
  const auto& grid = f.grid();
  Scalar worst = 0;
  for (std::size_t j = 0; j < grid.mode_count(); ++j) {
    const Eigen::Matrix<Complex, 3, 1> kv = grid.wave(j).template cast<Scalar>().template cast<Complex>();
    worst = std::max(worst, std::abs(kv.dot(f[j])));
  }
  return worst;
}

/// Largest |k| |u^(k)|; the natural scale for divergence tolerances.
template <typename Scalar>
Scalar gradient_scale(const SpectralField<Scalar>& f) {
  const auto& grid = f.grid();
  Scalar worst = 0;
  for (std::size_t j = 0; j < grid.mode_count(); ++j)
    worst = std::max(worst, std::sqrt(Scalar(grid.wave(j).squaredNorm())) * f[j].norm());
  return worst;
}

/// max_k |u^(-k) - conj(u^(k))|
template <typename Scalar>
Scalar hermitian_defect(const SpectralField<Scalar>& f) {
  const auto& grid = f.grid();
  Scalar worst = 0;
  for (std::size_t j = 0; j < grid.mode_count(); ++j)
    worst = std::max(worst, (f[grid.conjugate_index(j)] - f[j].conjugate()).norm());
  return worst;
}

/// Replaces each conjugate pair by its Hermitian average.
template <typename Scalar>
void enforce_hermitian(SpectralField<Scalar>& f) {
  const auto& grid = f.grid();
  const std::size_t half = grid.mode_count() / 2;
  for (std::size_t j = 0; j < half; ++j) {
    const std::size_t m = grid.conjugate_index(j);
    const typename SpectralField<Scalar>::Vector avg = Scalar(0.5) * (f[j] + f[m].conjugate());
    f[j] = avg;
    f[m] = avg.conjugate();
  }
  auto z = f[grid.zero_index()];
  z = z.real().template cast<std::complex<Scalar>>().eval();
}

template <typename Scalar>
bool all_finite(const SpectralField<Scalar>& f) {
  const auto& c = f.coefficients();
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (int i = 0; i < 3; ++i)
      if (!std::isfinite(c(i, j).real()) || !std::isfinite(c(i, j).imag())) return false;
  return true;
}

enum class FlowName { shear, taylor_green, abc };

inline FlowName parse_flow_name(std::string_view name) {
  if (name == "shear") return FlowName::shear;
  if (name == "taylor_green" || name == "taylor-green" || name == "tg") return FlowName::taylor_green;
  if (name == "abc") return FlowName::abc;
  throw std::invalid_argument("unknown flow name '" + std::string(name) + "'");
}

namespace detail {

// amplitude * sin(k.x) in component c
template <typename Scalar>
void add_sine(SpectralField<Scalar>& f, int c, const WaveVector& k, Scalar amplitude) {
  typename SpectralField<Scalar>::Vector v = SpectralField<Scalar>::Vector::Zero();
  v[c] = std::complex<Scalar>(0, -amplitude / 2);
  f.add_pair(k, v);
}

// amplitude * cos(k.x) in component c
template <typename Scalar>
void add_cosine(SpectralField<Scalar>& f, int c, const WaveVector& k, Scalar amplitude) {
  typename SpectralField<Scalar>::Vector v = SpectralField<Scalar>::Vector::Zero();
  v[c] = std::complex<Scalar>(amplitude / 2, 0);
  f.add_pair(k, v);
}

}  // namespace detail

/// Closed-form divergence-free flows used as exact-solution regressions.
///   shear        a (sin x2, 0, 0)
///   taylor_green a (sin x1 cos x2, -cos x1 sin x2, 0)
///   abc          a (sin x3 + cos x2, sin x1 + cos x3, sin x2 + cos x1)
template <typename Scalar = double>
SpectralField<Scalar> named_flow(FlowName name, Scalar amplitude, const GridSpec& grid) {
  SpectralField<Scalar> f(grid);
  if (amplitude == 0) return f;
  const Scalar a = amplitude;
  const Scalar h = a / 2;
  switch (name) {
    case FlowName::shear:
      detail::add_sine(f, 0, WaveVector(0, 1, 0), a);
      break;
    case FlowName::taylor_green:
      // sin x1 cos x2 = (sin(x1+x2) + sin(x1-x2)) / 2
      detail::add_sine(f, 0, WaveVector(1, 1, 0), h);
      detail::add_sine(f, 0, WaveVector(1, -1, 0), h);
      // -cos x1 sin x2 = -(sin(x1+x2) - sin(x1-x2)) / 2
      detail::add_sine(f, 1, WaveVector(1, 1, 0), -h);
      detail::add_sine(f, 1, WaveVector(1, -1, 0), h);
      break;
    case FlowName::abc:
      detail::add_sine(f, 0, WaveVector(0, 0, 1), a);
      detail::add_cosine(f, 0, WaveVector(0, 1, 0), a);
      detail::add_sine(f, 1, WaveVector(1, 0, 0), a);
      detail::add_cosine(f, 1, WaveVector(0, 0, 1), a);
      detail::add_sine(f, 2, WaveVector(0, 1, 0), a);
      detail::add_cosine(f, 2, WaveVector(1, 0, 0), a);
      break;
  }
  return f;
}

template <typename Scalar = double>
SpectralField<Scalar> named_flow(std::string_view name, Scalar amplitude, const GridSpec& grid) {
  return named_flow<Scalar>(parse_flow_name(name), amplitude, grid);
}

/// Random divergence-free datum with ||u||_{H^1} = amplitude.
///
/// Coefficients inside the ball |k| <= K are complex Gaussians with standard
/// deviation |k|^-slope, symmetrised, Leray projected and rescaled. The draw
/// depends only on (seed, grid, slope).
template <typename Scalar = double>
SpectralField<Scalar> random_divfree(Scalar amplitude, std::uint64_t seed, Scalar slope,
                                     const GridSpec& grid) {
  if (amplitude < 0) throw std::invalid_argument("amplitude must be non-negative");
  SpectralField<Scalar> f(grid);
  if (amplitude == 0) return f;
  const int kmax2 = grid.cutoff() * grid.cutoff();
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(seed + attempt);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    f.coefficients().setZero();
    // Draw on the half cube j > zero_index (k positive lexicographically),
    // mirror onto -k.
    const std::size_t n = grid.mode_count();
    for (std::size_t j = grid.zero_index() + 1; j < n; ++j) {
      const WaveVector k = grid.wave(j);
      const int k2 = k.squaredNorm();
      typename SpectralField<Scalar>::Vector v;
      for (int c = 0; c < 3; ++c) {
        const double re = normal(rng);
        const double im = normal(rng);
        v[c] = std::complex<Scalar>(Scalar(re), Scalar(im));
      }
      if (k2 > kmax2) continue;
      const Scalar sigma = std::pow(Scalar(k2), -slope / 2);
      f[j] = sigma * v;
      f[grid.conjugate_index(j)] = sigma * v.conjugate();
    }
    f = leray_project(std::move(f));
    const Scalar norm = hs_norm(f, Scalar(1));
    if (norm > 0) {
      f *= amplitude / norm;
      return f;
    }
  }
}

}  // namespace nstorus
