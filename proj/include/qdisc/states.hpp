#pragma once

// Named states and structured random batteries (product, separable, QC, CC).

#include "qdisc/random.hpp"

namespace qdisc {

/// sum_i q_i |a_i><a_i| (x) |b_i><b_i| with unit vectors a_i in C^m, b_i in C^n.
class SeparableAnsatz {
 public:
  struct Term {
    double weight;
    Vector a;
    Vector b;
  };

  SeparableAnsatz(Index dim_a, Index dim_b, std::vector<Term> terms)
      : dim_a_(dim_a), dim_b_(dim_b), terms_(std::move(terms)) {
    if (terms_.empty()) throw InvariantError("SeparableAnsatz: no terms");
    const auto cap = static_cast<size_t>(dim_a * dim_b * dim_a * dim_b);
    if (terms_.size() > cap) throw InvariantError("SeparableAnsatz: more than (mn)^2 terms");
    double total = 0.0;
    for (const auto& t : terms_) {
      if (t.weight < 0.0) throw InvariantError("SeparableAnsatz: negative weight");
      if (t.a.size() != dim_a || t.b.size() != dim_b) throw InvariantError("SeparableAnsatz: vector dimension mismatch");
      if (std::abs(t.a.norm() - 1.0) > tol::kNorm || std::abs(t.b.norm() - 1.0) > tol::kNorm) {
        throw InvariantError("SeparableAnsatz: term vectors must be unit norm");
      }
      total += t.weight;
    }
    if (std::abs(total - 1.0) > tol::kTrace) throw InvariantError("SeparableAnsatz: weights must sum to 1");
  }

  Index dim_a() const { return dim_a_; }
  Index dim_b() const { return dim_b_; }
  const std::vector<Term>& terms() const { return terms_; }

  Matrix assemble() const {
    Matrix s = Matrix::Zero(dim_a_ * dim_b_, dim_a_ * dim_b_);
    for (const auto& t : terms_) {
      const Vector ab = kron(t.a, t.b);
      s.noalias() += t.weight * (ab * ab.adjoint());
    }
    return s;
  }

  BipartiteState state() const { return BipartiteState(hermitize(assemble()), dim_a_, dim_b_); }

 private:
  Index dim_a_;
  Index dim_b_;
  std::vector<Term> terms_;
};

inline Vector basis_vector(Index dim, Index k) {
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return v;
}

/// (|00> + |11>) / sqrt 2.
inline BipartiteState bell_state() {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return BipartiteState(projector(v), 2, 2);
}

/// w |Phi+><Phi+| + (1 - w) I/4; w = 1 is the Bell state, entangled for w > 1/3.
inline BipartiteState werner_state(double w) {
  if (w < 0.0 || w > 1.0) throw InvariantError("werner_state: w must lie in [0, 1]");
  return BipartiteState(w * bell_state().matrix() + (1.0 - w) * Matrix::Identity(4, 4) / 4.0, 2, 2);
}

inline BipartiteState product_state(const DensityMatrix& a, const DensityMatrix& b) {
  return BipartiteState(kron(a.matrix(), b.matrix()), a.dim(), b.dim());
}

inline BipartiteState random_product_state(Index m, Index n, Rng& rng) {
  const DensityMatrix a = random_density_matrix(m, m, rng);
  const DensityMatrix b = random_density_matrix(n, n, rng);
  return product_state(a, b);
}

inline SeparableAnsatz random_separable_ansatz(Index m, Index n, Index terms, Rng& rng) {
  const std::vector<double> q = random_simplex(terms, rng);
  std::vector<SeparableAnsatz::Term> ts;
  for (Index i = 0; i < terms; ++i) {
    ts.push_back({q[static_cast<size_t>(i)], random_pure_state(m, rng).amplitudes(),
                  random_pure_state(n, rng).amplitudes()});
  }
  return SeparableAnsatz(m, n, std::move(ts));
}

/// Random QC state sum_i p_i rho_i^A (x) |b_i><b_i| with a Haar basis {b_i}.
struct QuantumClassicalSample {
  BipartiteState state;
  Matrix basis_b;  // columns b_i
};

inline QuantumClassicalSample random_qc_state(Index m, Index n, Rng& rng) {
  const Matrix u = random_unitary(n, rng);
  const std::vector<double> p = random_simplex(n, rng);
  Matrix rho = Matrix::Zero(m * n, m * n);
  for (Index i = 0; i < n; ++i) {
    const DensityMatrix ra = random_density_matrix(m, m, rng);
    rho += p[static_cast<size_t>(i)] * kron(ra.matrix(), projector(u.col(i)));
  }
  return {BipartiteState(hermitize(rho), m, n), u};
}

/// Random CC state sum_ij p_ij |a_i><a_i| (x) |b_j><b_j|.
struct ClassicalClassicalSample {
  BipartiteState state;
  Matrix basis_a;
  Matrix basis_b;
  Eigen::MatrixXd weights;  // p_ij
};

inline ClassicalClassicalSample random_cc_state(Index m, Index n, Rng& rng) {
  const Matrix ua = random_unitary(m, rng);
  const Matrix ub = random_unitary(n, rng);
  const std::vector<double> p = random_simplex(m * n, rng);
  Eigen::MatrixXd w(m, n);
  Matrix rho = Matrix::Zero(m * n, m * n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      w(i, j) = p[static_cast<size_t>(i * n + j)];
      rho += w(i, j) * kron(projector(ua.col(i)), projector(ub.col(j)));
    }
  return {BipartiteState(hermitize(rho), m, n), ua, ub, w};
}

}  // namespace qdisc
