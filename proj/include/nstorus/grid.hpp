#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace nstorus {

/// Integer wave vector k in Z^3. |k|^2 is the eigenvalue of -Laplacian.
using WaveVector = Eigen::Vector3i;

enum class Dealias {
  two_thirds,  ///< products evaluated on the N-grid (padded only when 3K >= N)
  padded,      ///< products evaluated on a 3N/2 grid
};

/// Collocation resolution and Fourier truncation on the 2*pi-periodic torus.
///
/// Retained modes form the cube |k_i| <= K. Coefficients are laid out
/// row-major over that cube with k1 slowest, so the linear index of k is
/// ((k1 + K) * L + (k2 + K)) * L + (k3 + K) with L = 2K + 1.
class GridSpec {
 public:
  GridSpec() : GridSpec(16) {}

  explicit GridSpec(int n, Dealias dealias = Dealias::two_thirds)
      : GridSpec(n, default_cutoff(n, dealias), dealias) {}

  GridSpec(int n, int k, Dealias dealias = Dealias::two_thirds)
      : n_(n), k_(k), dealias_(dealias) {
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("grid resolution N must be even and >= 4, got " +
                                  std::to_string(n));
    if (k < 1 || k > n / 2 - 1)
      throw std::invalid_argument("dealias cutoff K must satisfy 1 <= K <= N/2-1, got " +
                                  std::to_string(k));
  }

  static int default_cutoff(int n, Dealias dealias) {
    return dealias == Dealias::two_thirds ? n / 3 : n / 2 - 1;
  }

  int resolution() const { return n_; }
  int cutoff() const { return k_; }
  Dealias dealias() const { return dealias_; }

  int side() const { return 2 * k_ + 1; }
  std::size_t mode_count() const {
    const auto l = static_cast<std::size_t>(side());
    return l * l * l;
  }

  /// Points per axis of the grid on which quadratic products are formed.
  /// Always at least 3K+1 so products of retained modes never alias back
  /// into the retained cube.
  int transform_size() const {
    const int exact = 3 * k_ + 1 + (3 * k_ + 1) % 2;
    const int base = dealias_ == Dealias::two_thirds ? n_ : 3 * n_ / 2 + (3 * n_ / 2) % 2;
    return base > exact ? base : exact;
  }

  bool contains(const WaveVector& k) const {
    return k.cwiseAbs().maxCoeff() <= k_;
  }

  std::size_t index(const WaveVector& k) const {
    const std::size_t l = side();
    return (static_cast<std::size_t>(k[0] + k_) * l + static_cast<std::size_t>(k[1] + k_)) * l +
           static_cast<std::size_t>(k[2] + k_);
  }

  WaveVector wave(std::size_t idx) const {
    const std::size_t l = side();
    const int k3 = static_cast<int>(idx % l) - k_;
    idx /= l;
    const int k2 = static_cast<int>(idx % l) - k_;
    const int k1 = static_cast<int>(idx / l) - k_;
    return {k1, k2, k3};
  }

  std::size_t zero_index() const { return index(WaveVector::Zero()); }

  /// Index of -k. The cube is symmetric so this is the mirrored linear index.
  std::size_t conjugate_index(std::size_t idx) const { return mode_count() - 1 - idx; }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.n_ == b.n_ && a.k_ == b.k_ && a.dealias_ == b.dealias_;
  }
  friend bool operator!=(const GridSpec& a, const GridSpec& b) { return !(a == b); }

 private:
  int n_;
  int k_;
  Dealias dealias_;
};

}  // namespace nstorus
