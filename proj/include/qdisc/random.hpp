#pragma once

// Seeded random states, unitaries, and operators. RNG state is always explicit.

#include <cstdint>
#include <random>

#include "qdisc/qcore.hpp"

namespace qdisc {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent stream seeds from a master seed.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(split_seed(seed, 0)); }

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      g(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  return g;
}

inline Vector gaussian_vector(Index n, Rng& rng) { return gaussian_matrix(n, 1, rng).col(0); }

/// Haar-distributed pure state (normalized complex Gaussian vector).
inline PureState random_pure_state(Index dim, Rng& rng) {
  if (dim < 1) throw InvariantError("random_pure_state: dim must be positive");
  Vector v = gaussian_vector(dim, rng);
  return PureState(v / v.norm());
}

inline PureState random_pure_state(Index dim, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return random_pure_state(dim, rng);
}

/// tr_anc of a Haar-random pure state on C^dim (x) C^rank.
inline DensityMatrix random_density_matrix(Index dim, Index rank, Rng& rng) {
  if (dim < 1 || rank < 1 || rank > dim) {
    throw InvariantError("random_density_matrix: rank must satisfy 1 <= rank <= dim");
  }
  const PureState psi = random_pure_state(dim * rank, rng);
  return DensityMatrix(hermitize(reduced_of_vector(psi.amplitudes(), dim, rank)));
}

inline DensityMatrix random_density_matrix(Index dim, Index rank, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return random_density_matrix(dim, rank, rng);
}

/// Haar unitary via QR of a Ginibre matrix with the phase correction on R's diagonal.
inline Matrix random_unitary(Index n, Rng& rng) {
  const Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    const double a = std::abs(d);
    if (a > 0.0) q.col(i) *= d / a;
  }
  return q;
}

/// GUE-style random Hermitian matrix.
inline Matrix random_hermitian(Index n, Rng& rng) { return hermitize(gaussian_matrix(n, n, rng)); }

/// Uniform point on the probability simplex (flat Dirichlet).
inline std::vector<double> random_simplex(Index k, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(static_cast<size_t>(k));
  double s = 0.0;
  for (auto& x : p) {
    x = e(rng);
    s += x;
  }
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace qdisc
