#pragma once

#include <array>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nstorus/spectral_field.hpp"
#include "nstorus/transform.hpp"

namespace nstorus {

/// Divergence allowed on inputs to the nonlinearity, relative to the
/// field's gradient scale.
template <typename Scalar>
Scalar divergence_tolerance(const SpectralField<Scalar>& u) {
  return Scalar(1e5) * std::numeric_limits<Scalar>::epsilon() * (Scalar(1) + gradient_scale(u));
}

/// Pseudo-spectral evaluation of D(u (x) u) = -P(k) i k_m (u u_m)^(k).
///
/// Products are formed on the collocation grid of GridSpec::transform_size(),
/// which is large enough that no product of retained modes aliases back into
/// the retained cube. Reuses its transform buffers across calls.
template <typename Scalar>
class Convection {
 public:
  using Complex = std::complex<Scalar>;

  explicit Convection(const GridSpec& grid)
      : transform_(grid), diagonal_(grid), off_diagonal_(grid),
        first_(transform_.point_count()),
        second_(transform_.point_count()) {
    for (auto& v : velocity_) v.resize(transform_.point_count());
  }

  const GridSpec& grid() const { return transform_.grid(); }

  SpectralField<Scalar> operator()(const SpectralField<Scalar>& u) {
    if (u.grid() != grid()) throw std::invalid_argument("convection: grid mismatch");
    if (divergence_linf(u) > divergence_tolerance(u))
      throw std::invalid_argument("convection: input velocity is not divergence-free");

    transform_.to_physical(u, 0, 1, velocity_[0], velocity_[1]);
    transform_.to_physical(u, 2, velocity_[2]);

    // Products u_l u_m: 00 11 22 on the diagonal field, 01 02 12 on the
    // off-diagonal field, two per complex transform.
    const auto& v = velocity_;
    multiply(v[0], v[0], first_);
    multiply(v[1], v[1], second_);
    transform_.from_physical(first_, second_, diagonal_, 0, diagonal_, 1);
    multiply(v[2], v[2], first_);
    multiply(v[0], v[1], second_);
    transform_.from_physical(first_, second_, diagonal_, 2, off_diagonal_, 0);
    multiply(v[0], v[2], first_);
    multiply(v[1], v[2], second_);
    transform_.from_physical(first_, second_, off_diagonal_, 1, off_diagonal_, 2);

    SpectralField<Scalar> out(grid());
    const auto& g = grid();
    for (std::size_t j = 0; j < g.mode_count(); ++j) {
      const WaveVector k = g.wave(j);
      const int k2 = k.squaredNorm();
      if (k2 == 0) continue;
      const auto d = diagonal_[j];
      const auto o = off_diagonal_[j];
      Eigen::Matrix<Complex, 3, 3> t;
      t << d[0], o[0], o[1],
           o[0], d[1], o[2],
           o[1], o[2], d[2];
      const Eigen::Matrix<Scalar, 3, 1> kv = k.cast<Scalar>();
      // w_i = i k_m T_im
      const Eigen::Matrix<Complex, 3, 1> w = Complex(0, 1) * (t * kv.template cast<Complex>());
      const Complex kw = kv.template cast<Complex>().dot(w);
      out[j] = -(w - (kw / Scalar(k2)) * kv.template cast<Complex>());
    }
    enforce_hermitian(out);
    out[g.zero_index()].setZero();
    return out;
  }

 private:
  static void multiply(const std::vector<Scalar>& a, const std::vector<Scalar>& b,
                       std::vector<Scalar>& out) {
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = a[p] * b[p];
  }

  Transform3<Scalar> transform_;
  std::array<std::vector<Scalar>, 3> velocity_;
  SpectralField<Scalar> diagonal_;
  SpectralField<Scalar> off_diagonal_;
  std::vector<Scalar> first_;
  std::vector<Scalar> second_;
};

template <typename Scalar>
SpectralField<Scalar> nonlinear_term(const SpectralField<Scalar>& u) {
  Convection<Scalar> convection(u.grid());
  return convection(u);
}

/// Samples every component of f on its collocation grid.
template <typename Scalar>
std::array<std::vector<Scalar>, 3> to_physical(const SpectralField<Scalar>& f) {
  Transform3<Scalar> transform(f.grid());
  std::array<std::vector<Scalar>, 3> out;
  for (int c = 0; c < 3; ++c) {
    out[c].resize(transform.point_count());
    transform.to_physical(f, c, out[c]);
  }
  return out;
}

}  // namespace nstorus
