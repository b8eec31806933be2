#pragma once

// Projective and POVM measurements, their optimizer parametrizations, and the
// ensembles they induce (local measurement on B, steering through a purification).

#include <variant>

#include "qdisc/qcore.hpp"

namespace qdisc {

enum class MeasurementKind { VonNeumann, Povm };

inline const char* to_string(MeasurementKind k) { return k == MeasurementKind::VonNeumann ? "vn" : "povm"; }

namespace detail {

inline void check_completeness(const std::vector<Matrix>& elems, Index n, const char* who) {
  Matrix sum = Matrix::Zero(n, n);
  for (const auto& e : elems) {
    if (e.rows() != n || e.cols() != n) throw InvariantError(std::string(who) + ": element shape mismatch");
    sum += e;
  }
  const double defect = (sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > tol::kMeasurement) {
    std::ostringstream os;
    os << who << ": completeness invariant violated (max |sum - I| = " << defect << ")";
    throw InvariantError(os.str());
  }
}

}  // namespace detail

/// Orthogonal projectors summing to the identity.
class VonNeumannMeasurement {
 public:
  VonNeumannMeasurement(Index dim, std::vector<Matrix> projectors) : dim_(dim), elems_(std::move(projectors)) {
    if (elems_.empty()) throw InvariantError("VonNeumannMeasurement: no projectors");
    for (size_t i = 0; i < elems_.size(); ++i) {
      const Matrix& p = elems_[i];
      if (p.rows() != dim || p.cols() != dim) throw InvariantError("VonNeumannMeasurement: projector shape mismatch");
      if (hermitian_defect(p) > tol::kMeasurement || (p * p - p).cwiseAbs().maxCoeff() > tol::kMeasurement) {
        throw InvariantError("VonNeumannMeasurement: element is not a Hermitian idempotent");
      }
      for (size_t j = 0; j < i; ++j) {
        if ((p * elems_[j]).cwiseAbs().maxCoeff() > tol::kMeasurement) {
          throw InvariantError("VonNeumannMeasurement: projectors are not mutually orthogonal");
        }
      }
    }
    detail::check_completeness(elems_, dim, "VonNeumannMeasurement");
  }

  Index dim() const { return dim_; }
  const std::vector<Matrix>& elements() const { return elems_; }

 private:
  Index dim_;
  std::vector<Matrix> elems_;
};

/// At most n^2 PSD operators summing to the identity.
class POVM {
 public:
  POVM(Index dim, std::vector<Matrix> elements) : dim_(dim), elems_(std::move(elements)) {
    if (elems_.empty()) throw InvariantError("POVM: no elements");
    if (static_cast<Index>(elems_.size()) > dim * dim) throw InvariantError("POVM: more than n^2 elements");
    for (const auto& e : elems_) {
      if (e.rows() != dim || e.cols() != dim) throw InvariantError("POVM: element shape mismatch");
      if (hermitian_defect(e) > tol::kMeasurement) throw InvariantError("POVM: element is not Hermitian");
      if (eigvalsh(hermitize(e)).minCoeff() < -tol::kPsd) throw InvariantError("POVM: element is not PSD");
    }
    detail::check_completeness(elems_, dim, "POVM");
  }

  Index dim() const { return dim_; }
  const std::vector<Matrix>& elements() const { return elems_; }

 private:
  Index dim_;
  std::vector<Matrix> elems_;
};

using Measurement = std::variant<VonNeumannMeasurement, POVM>;

inline const std::vector<Matrix>& elements_of(const Measurement& m) {
  return std::visit([](const auto& x) -> const std::vector<Matrix>& { return x.elements(); }, m);
}

inline Index dim_of(const Measurement& m) {
  return std::visit([](const auto& x) { return x.dim(); }, m);
}

struct Outcome {
  double probability;
  Matrix state;  // conditional state; maximally mixed placeholder when probability < 1e-12
  bool placeholder = false;
};

class MeasurementOutcomeSet {
 public:
  explicit MeasurementOutcomeSet(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
    double total = 0.0;
    for (const auto& o : outcomes_) total += o.probability;
    if (std::abs(total - 1.0) > tol::kMeasurement) throw InvariantError("MeasurementOutcomeSet: probabilities do not sum to 1");
  }

  const std::vector<Outcome>& outcomes() const { return outcomes_; }

  /// sum_i p_i S(rho_i); negligible outcomes contribute nothing.
  double average_entropy() const {
    double s = 0.0;
    for (const auto& o : outcomes_)
      if (!o.placeholder) s += o.probability * entropy_bits(o.state);
    return s;
  }

  Matrix average_state() const {
    Matrix out = Matrix::Zero(outcomes_.front().state.rows(), outcomes_.front().state.cols());
    for (const auto& o : outcomes_)
      if (!o.placeholder) out += o.probability * o.state;
    return out;
  }

 private:
  std::vector<Outcome> outcomes_;
};

/// (I (x) <u|) rho (I (x) |u>) for rho on C^m (x) C^n: the unnormalized conditional
/// state of A after the rank-1 outcome |u><u| on B.
inline Matrix conditional_a_rank1(const Matrix& rho, Index m, Index n, const Vector& u) {
  Matrix out(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index a2 = 0; a2 < m; ++a2) {
      cplx s = 0.0;
      for (Index b = 0; b < n; ++b) {
        cplx t = 0.0;
        for (Index b2 = 0; b2 < n; ++b2) t += rho(a * n + b, a2 * n + b2) * u(b2);
        s += std::conj(u(b)) * t;
      }
      out(a, a2) = s;
    }
  return out;
}

/// tr_B(rho (I (x) E)) for a general element E on B.
inline Matrix conditional_a(const Matrix& rho, Index m, Index n, const Matrix& e) {
  Matrix out(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index a2 = 0; a2 < m; ++a2) {
      cplx s = 0.0;
      for (Index b = 0; b < n; ++b)
        for (Index b2 = 0; b2 < n; ++b2) s += rho(a * n + b, a2 * n + b2) * e(b2, b);
      out(a, a2) = s;
    }
  return out;
}

inline MeasurementOutcomeSet measure_b(const BipartiteState& state, const Measurement& meas) {
  if (dim_of(meas) != state.dim_b()) throw InvariantError("measure_B: measurement dim != dim B");
  std::vector<Outcome> outs;
  for (const auto& e : elements_of(meas)) {
    const Matrix x = hermitize(conditional_a(state.matrix(), state.dim_a(), state.dim_b(), e));
    const double p = x.trace().real();
    if (p < tol::kNegligibleProbability) {
      outs.push_back({std::max(p, 0.0), Matrix::Identity(state.dim_a(), state.dim_a()) / static_cast<double>(state.dim_a()), true});
    } else {
      outs.push_back({p, x / p, false});
    }
  }
  return MeasurementOutcomeSet(std::move(outs));
}

inline double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

/// Rank-1 projectors onto the columns of a unitary.
inline VonNeumannMeasurement vn_from_unitary(const Matrix& u) {
  if (u.rows() != u.cols() || unitarity_defect(u) > tol::kMeasurement) {
    throw InvariantError("vn_from_unitary: input is not unitary");
  }
  std::vector<Matrix> ps;
  for (Index k = 0; k < u.cols(); ++k) ps.push_back(projector(u.col(k)));
  return VonNeumannMeasurement(u.rows(), std::move(ps));
}

/// M (M^H M)^{-1/2}; the rows define a rank-1 POVM, the columns are orthonormal.
/// Returns false when M^H M is numerically singular.
inline bool orthonormalize_columns(const Matrix& m, Matrix& out) {
  const Matrix s = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (!(es.eigenvalues().minCoeff() > tol::kRank)) return false;
  const RealVector inv = es.eigenvalues().cwiseSqrt().cwiseInverse();
  out = m * (es.eigenvectors() * inv.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
  return true;
}

/// Rank-1 POVM from the rows of a k x n matrix M: elements v_i v_i^H with
/// v_i^H = row i of M (M^H M)^{-1/2}.
inline POVM povm_from_matrix(const Matrix& m) {
  const Index n = m.cols();
  if (m.rows() > n * n) throw InvariantError("povm_from_matrix: more than n^2 rows");
  Matrix t;
  if (!orthonormalize_columns(m, t)) throw InvariantError("povm_from_matrix: M^H M is singular");
  std::vector<Matrix> elems;
  for (Index i = 0; i < t.rows(); ++i) {
    const Vector v = t.row(i).adjoint();
    elems.push_back(v * v.adjoint());
  }
  return POVM(n, std::move(elems));
}

// ---------------------------------------------------------------------------
// optimizer parametrizations

/// Hermitian matrix from n^2 reals: diagonal first, then (re, im) of the strict upper triangle.
inline Matrix hermitian_from_params(Index n, const double* p) {
  Matrix h = Matrix::Zero(n, n);
  Index c = 0;
  for (Index i = 0; i < n; ++i) h(i, i) = p[c++];
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      h(i, j) = cplx(p[c], p[c + 1]);
      h(j, i) = std::conj(h(i, j));
      c += 2;
    }
  return h;
}

/// U = exp(iH) with H from hermitian_from_params.
inline Matrix unitary_from_params(Index n, const double* p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_from_params(n, p));
  Vector phases(n);
  for (Index i = 0; i < n; ++i) phases(i) = std::polar(1.0, es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline RealVector params_from_hermitian(const Matrix& h) {
  const Index n = h.rows();
  RealVector p(n * n);
  Index c = 0;
  for (Index i = 0; i < n; ++i) p(c++) = h(i, i).real();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      p(c++) = h(i, j).real();
      p(c++) = h(i, j).imag();
    }
  return p;
}

/// Parameters of a given unitary, using the principal branch of -i log U.
inline RealVector params_from_unitary(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& q = schur.matrixU();
  Vector angles(u.rows());
  for (Index i = 0; i < u.rows(); ++i) angles(i) = std::arg(schur.matrixT()(i, i));
  return params_from_hermitian(hermitize(q * angles.asDiagonal() * q.adjoint()));
}

/// rows x cols complex matrix from 2 * rows * cols reals (re, im interleaved, row-major).
inline Matrix complex_matrix_from_params(Index rows, Index cols, const double* p) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      const Index c = 2 * (i * cols + j);
      m(i, j) = cplx(p[c], p[c + 1]);
    }
  return m;
}

inline RealVector params_from_complex_matrix(const Matrix& m) {
  RealVector p(2 * m.size());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const Index c = 2 * (i * m.cols() + j);
      p(c) = m(i, j).real();
      p(c + 1) = m(i, j).imag();
    }
  return p;
}

// ---------------------------------------------------------------------------
// steering

/// Ensemble on AB induced by measuring C of a tripartite pure state:
/// p_i = <Psi|(I (x) E_i)|Psi>, rho_i = tr_C((I (x) sqrt E_i)|Psi><Psi|(I (x) sqrt E_i)) / p_i.
inline Ensemble steer_ensemble(const TripartitePureState& psi, const Measurement& meas_c) {
  const Index dc = psi.dim_c();
  if (dim_of(meas_c) != dc) throw InvariantError("steer_ensemble: measurement dim != dim C");
  const Index ab = psi.dim_a() * psi.dim_b();
  std::vector<Matrix> parts;
  for (const auto& e : elements_of(meas_c)) {
    const Matrix root = psd_sqrt(hermitize(e));
    Vector phi(ab * dc);
    for (Index i = 0; i < ab; ++i) phi.segment(i * dc, dc) = root * psi.amplitudes().segment(i * dc, dc);
    parts.push_back(hermitize(reduced_of_vector(phi, ab, dc)));
  }
  return ensemble_from_unnormalized(parts);
}

/// Von Neumann measurement on C (dim_c >= k) steering the purification
/// sum_j sqrt(lambda_j)|e_j>|j> into the ensemble w_i = sum_j V_ij sqrt(lambda_j)|e_j>,
/// where V is a k x r isometry. V is completed to a k x k unitary W and outcome i
/// projects onto sum_j conj(W_ij)|j>.
inline VonNeumannMeasurement hjw_measurement(const Matrix& isometry, Index dim_c) {
  const Index k = isometry.rows();
  const Index r = isometry.cols();
  if (dim_c < k) throw InvariantError("hjw_measurement: dim C smaller than the ensemble size");
  if (unitarity_defect(isometry) > 1e-8) throw InvariantError("hjw_measurement: input is not an isometry");
  Matrix w(k, k);
  w.leftCols(r) = isometry;
  if (k > r) {
    Eigen::HouseholderQR<Matrix> qr(isometry);
    const Matrix q = qr.householderQ();
    w.rightCols(k - r) = q.rightCols(k - r);
  }
  Matrix basis = Matrix::Identity(dim_c, dim_c);
  basis.topLeftCorner(k, k) = w.adjoint();  // column i has entries conj(W_ij)
  return vn_from_unitary(basis);
}

}  // namespace qdisc
