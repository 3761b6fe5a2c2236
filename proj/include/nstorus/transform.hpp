#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "nstorus/spectral_field.hpp"

namespace nstorus {

/// 3D transforms between retained coefficients and samples on the M^3
/// collocation grid x_j = 2*pi*j/M, M = grid.transform_size().
///
/// Only lines that can carry retained modes are transformed, so the cost is
/// dominated by the M^2 full-length passes along the first axis. The paired
/// overloads push two real fields through one complex transform. Holds
/// scratch buffers: one instance per thread.
template <typename Scalar>
class Transform3 {
 public:
  using Complex = std::complex<Scalar>;

  explicit Transform3(const GridSpec& grid)
      : grid_(grid),
        m_(grid.transform_size()),
        cube_(static_cast<std::size_t>(m_) * m_ * m_),
        line_in_(m_),
        line_out_(m_) {
    fft_.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    for (int k = -grid.cutoff(); k <= grid.cutoff(); ++k) retained_.push_back(slot(k));
    for (int i = 0; i < m_; ++i) all_.push_back(i);
    offsets_.reserve(grid.mode_count());
    for (std::size_t j = 0; j < grid.mode_count(); ++j) {
      const WaveVector k = grid.wave(j);
      offsets_.push_back(offset(slot(k[0]), slot(k[1]), slot(k[2])));
    }
  }

  const GridSpec& grid() const { return grid_; }
  int size() const { return m_; }
  std::size_t point_count() const { return cube_.size(); }

  /// Samples component c of f on the collocation grid (row-major, x3 fastest).
  void to_physical(const SpectralField<Scalar>& f, int c, std::span<Scalar> out) {
    clear();
    for (std::size_t j = 0; j < offsets_.size(); ++j) cube_[offsets_[j]] = f[j][c];
    inverse();
    imaginary_max_ = 0;
    for (std::size_t p = 0; p < cube_.size(); ++p) {
      out[p] = cube_[p].real();
      imaginary_max_ = std::max(imaginary_max_, std::abs(cube_[p].imag()));
    }
  }

  /// Samples components ca and cb of f with one complex transform.
  void to_physical(const SpectralField<Scalar>& f, int ca, int cb, std::span<Scalar> a,
                   std::span<Scalar> b) {
    clear();
    const Complex i(0, 1);
    for (std::size_t j = 0; j < offsets_.size(); ++j) cube_[offsets_[j]] = f[j][ca] + i * f[j][cb];
    inverse();
    for (std::size_t p = 0; p < cube_.size(); ++p) {
      a[p] = cube_[p].real();
      b[p] = cube_[p].imag();
    }
  }

  /// Largest |Im| discarded by the last single-component to_physical call.
  Scalar imaginary_max() const { return imaginary_max_; }

  /// Forward transform of real samples into component c of dst (retained
  /// modes only, normalised by 1/M^3).
  void from_physical(std::span<const Scalar> values, SpectralField<Scalar>& dst, int c) {
    for (std::size_t p = 0; p < cube_.size(); ++p) cube_[p] = Complex(values[p], 0);
    forward();
    const Scalar scale = Scalar(1) / Scalar(cube_.size());
    for (std::size_t j = 0; j < offsets_.size(); ++j) dst[j][c] = scale * cube_[offsets_[j]];
  }

  /// Forward transforms of two real sample sets through one complex
  /// transform, split by Hermitian symmetry.
  void from_physical(std::span<const Scalar> a, std::span<const Scalar> b,
                     SpectralField<Scalar>& dst_a, int ca, SpectralField<Scalar>& dst_b, int cb) {
    for (std::size_t p = 0; p < cube_.size(); ++p) cube_[p] = Complex(a[p], b[p]);
    forward();
    const Scalar half = Scalar(0.5) / Scalar(cube_.size());
    const std::size_t n = offsets_.size();
    for (std::size_t j = 0; j < n; ++j) {
      const Complex z = cube_[offsets_[j]];
      const Complex zc = std::conj(cube_[offsets_[n - 1 - j]]);
      const Complex diff = z - zc;
      dst_a[j][ca] = half * (z + zc);
      dst_b[j][cb] = half * Complex(diff.imag(), -diff.real());
    }
  }

 private:
  int slot(int k) const { return k >= 0 ? k : k + m_; }

  std::size_t offset(int i1, int i2, int i3) const {
    return (static_cast<std::size_t>(i1) * m_ + static_cast<std::size_t>(i2)) * m_ +
           static_cast<std::size_t>(i3);
  }

  void clear() { std::fill(cube_.begin(), cube_.end(), Complex(0)); }

  void inverse() {
    transform_axis(2, retained_, retained_, false);
    transform_axis(1, retained_, all_, false);
    transform_axis(0, all_, all_, false);
  }

  void forward() {
    transform_axis(0, all_, all_, true);
    transform_axis(1, retained_, all_, true);
    transform_axis(2, retained_, retained_, true);
  }

  // Transforms every line along `axis` whose two remaining indices (in
  // increasing axis order) are drawn from `first` and `second`.
  void transform_axis(int axis, const std::vector<int>& first, const std::vector<int>& second,
                      bool forward) {
    const std::size_t stride = axis == 0 ? std::size_t(m_) * m_ : axis == 1 ? m_ : 1;
    for (int a : first) {
      for (int b : second) {
        std::size_t base = 0;
        if (axis == 0) base = offset(0, a, b);
        if (axis == 1) base = offset(a, 0, b);
        if (axis == 2) base = offset(a, b, 0);
        const Complex* src = &cube_[base];
        if (stride != 1) {
          for (int i = 0; i < m_; ++i) line_in_[i] = cube_[base + i * stride];
          src = line_in_.data();
        }
        if (forward)
          fft_.fwd(line_out_.data(), src, m_);
        else
          fft_.inv(line_out_.data(), src, m_);
        for (int i = 0; i < m_; ++i) cube_[base + i * stride] = line_out_[i];
      }
    }
  }

  GridSpec grid_;
  int m_;
  Eigen::FFT<Scalar> fft_;
  std::vector<Complex> cube_;
  std::vector<Complex> line_in_;
  std::vector<Complex> line_out_;
  std::vector<int> retained_;
  std::vector<int> all_;
  std::vector<std::size_t> offsets_;
  Scalar imaginary_max_ = 0;
};

}  // namespace nstorus
