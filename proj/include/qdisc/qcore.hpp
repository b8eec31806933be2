#pragma once

// Dense complex linear algebra for finite-dimensional quantum states.
//
// Conventions used everywhere in the library:
//   * composite indices are A-major: row i = a * dim_b + b;
//   * entropies are in bits;
//   * eigenvalues below kRank are treated as zero when deciding rank/support.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdisc/error.hpp"

namespace qdisc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double kHermitian = 1e-9;
inline constexpr double kTrace = 1e-9;
inline constexpr double kPsd = 1e-9;
inline constexpr double kNorm = 1e-9;
inline constexpr double kRank = 1e-10;
inline constexpr double kEnsemble = 1e-8;
inline constexpr double kMeasurement = 1e-8;
inline constexpr double kNegligibleProbability = 1e-12;
}  // namespace tol

inline constexpr double kLn2 = std::numbers::ln2;

/// A real number or +infinity. Infinity is a flag, never an overflowed double.
class ExtendedReal {
 public:
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtendedReal infinity() {
    ExtendedReal r(0.0);
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const { return infinite_; }

  double value() const {
    if (infinite_) throw std::domain_error("ExtendedReal: value() called on +infinity");
    return value_;
  }

  constexpr double value_or(double fallback) const { return infinite_ ? fallback : value_; }

 private:
  double value_;
  bool infinite_ = false;
};

// ---------------------------------------------------------------------------
// small matrix helpers

inline double hermitian_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Matrix projector(const Vector& v) { return v * v.adjoint(); }

/// Eigenvalues of a Hermitian matrix in ascending order.
inline RealVector eigvalsh(const Matrix& h) {
  const Index n = h.rows();
  if (n == 1) return RealVector::Constant(1, h(0, 0).real());
  if (n == 2) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double half = 0.5 * (a - d);
    const double r = std::sqrt(half * half + std::norm(h(0, 1)));
    RealVector out(2);
    out << mean - r, mean + r;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// f applied to the spectrum of a Hermitian matrix.
template <typename F>
Matrix hermitian_function(const Matrix& h, F&& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector& w = es.eigenvalues();
  Vector fw(w.size());
  for (Index i = 0; i < w.size(); ++i) fw(i) = cplx(f(w(i)), 0.0);
  return es.eigenvectors() * fw.asDiagonal() * es.eigenvectors().adjoint();
}

/// Square root of a PSD matrix; tiny negative eigenvalues are clipped.
inline Matrix psd_sqrt(const Matrix& h) {
  return hermitian_function(h, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

/// -sum x log2 x with the 0 log 0 = 0 convention. Negative entries are clipped.
inline double shannon_bits(const RealVector& spectrum) {
  double s = 0.0;
  for (Index i = 0; i < spectrum.size(); ++i) s -= xlog2x(spectrum(i));
  return s;
}

/// Entropy (bits) of a Hermitian PSD unit-trace matrix without validation.
inline double entropy_bits(const Matrix& rho) { return shannon_bits(eigvalsh(rho)); }

/// p * S(X / p) for a PSD matrix X with trace p, i.e. the weighted entropy of an
/// unnormalized ensemble member. Zero when p vanishes.
inline double weighted_entropy_bits(const Matrix& x) {
  const RealVector w = eigvalsh(x);
  double p = 0.0;
  double s = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) <= 0.0) continue;
    p += w(i);
    s -= xlog2x(w(i));
  }
  return p > 0.0 ? s + p * std::log2(p) : 0.0;
}

// ---------------------------------------------------------------------------
// state types

/// Hermitian, unit-trace, positive semidefinite matrix. Validated on construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix& m) : m_(validated(m)) {}

  static DensityMatrix maximally_mixed(Index dim) {
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  static DensityMatrix from_pure(const Vector& v) { return DensityMatrix(projector(v.normalized())); }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  RealVector eigenvalues() const { return eigvalsh(m_); }

 private:
  static Matrix validated(const Matrix& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
      throw InvariantError("DensityMatrix: matrix must be square and non-empty");
    }
    if (!m.allFinite()) throw InvariantError("DensityMatrix: entries must be finite");
    const double herm = hermitian_defect(m);
    if (herm > tol::kHermitian) {
      std::ostringstream os;
      os << "DensityMatrix: Hermitian invariant violated (max |M - M^H| = " << herm << ")";
      throw InvariantError(os.str());
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol::kTrace) {
      std::ostringstream os;
      os << "DensityMatrix: unit-trace invariant violated (trace = " << tr << ")";
      throw InvariantError(os.str());
    }
    Matrix h = hermitize(m);
    const double min_eig = eigvalsh(h).minCoeff();
    if (min_eig < -tol::kPsd) {
      std::ostringstream os;
      os << "DensityMatrix: PSD invariant violated (minimum eigenvalue = " << min_eig << ")";
      throw InvariantError(os.str());
    }
    return h;
  }

  Matrix m_;
};

enum class Subsystem { A, B };

/// Density matrix on C^m (x) C^n with A-major composite indexing.
class BipartiteState {
 public:
  BipartiteState(DensityMatrix rho, Index dim_a, Index dim_b)
      : rho_(std::move(rho)), dim_a_(dim_a), dim_b_(dim_b) {
    if (dim_a < 1 || dim_b < 1 || dim_a * dim_b != rho_.dim()) {
      std::ostringstream os;
      os << "BipartiteState: declared dims " << dim_a << "x" << dim_b
         << " do not match matrix size " << rho_.dim();
      throw InvariantError(os.str());
    }
  }

  BipartiteState(const Matrix& m, Index dim_a, Index dim_b)
      : BipartiteState(DensityMatrix(m), dim_a, dim_b) {}

  const DensityMatrix& rho() const { return rho_; }
  const Matrix& matrix() const { return rho_.matrix(); }
  Index dim_a() const { return dim_a_; }
  Index dim_b() const { return dim_b_; }
  Index dim() const { return rho_.dim(); }

 private:
  DensityMatrix rho_;
  Index dim_a_;
  Index dim_b_;
};

/// Unit vector with optional subsystem dimensions (product must equal the length).
class PureState {
 public:
  explicit PureState(Vector amplitudes, std::vector<Index> dims = {})
      : amps_(std::move(amplitudes)), dims_(std::move(dims)) {
    if (amps_.size() == 0) throw InvariantError("PureState: empty amplitude vector");
    if (std::abs(amps_.norm() - 1.0) > tol::kNorm) {
      std::ostringstream os;
      os << "PureState: unit-norm invariant violated (norm = " << amps_.norm() << ")";
      throw InvariantError(os.str());
    }
    if (dims_.empty()) dims_.push_back(amps_.size());
    Index prod = 1;
    for (Index d : dims_) prod *= d;
    if (prod != amps_.size()) throw InvariantError("PureState: dims do not match vector length");
  }

  Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  const std::vector<Index>& dims() const { return dims_; }
  DensityMatrix density() const { return DensityMatrix(projector(amps_)); }

 private:
  Vector amps_;
  std::vector<Index> dims_;
};

/// Completely positive trace-preserving map in operator-sum form.
class QuantumChannel {
 public:
  QuantumChannel(Index dim_in, Index dim_out, std::vector<Matrix> kraus)
      : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)) {
    if (dim_in < 1 || dim_out < 1) throw InvariantError("QuantumChannel: dimensions must be positive");
    if (kraus_.empty()) throw InvariantError("QuantumChannel: Kraus list is empty");
    Matrix sum = Matrix::Zero(dim_in, dim_in);
    for (const auto& k : kraus_) {
      if (k.rows() != dim_out || k.cols() != dim_in) {
        throw InvariantError("QuantumChannel: Kraus operator shape must be dim_out x dim_in");
      }
      sum += k.adjoint() * k;
    }
    const double defect = (sum - Matrix::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff();
    if (defect > tol::kHermitian) {
      std::ostringstream os;
      os << "QuantumChannel: completeness invariant violated (max |sum K^H K - I| = " << defect << ")";
      throw InvariantError(os.str());
    }
  }

  static QuantumChannel identity(Index d) { return QuantumChannel(d, d, {Matrix::Identity(d, d)}); }

  /// rho -> tr(rho) I/d, realised with d_in * d_out Kraus operators |j><i| / sqrt(d_out).
  static QuantumChannel fully_depolarizing(Index d_in, Index d_out) {
    std::vector<Matrix> ks;
    const double s = 1.0 / std::sqrt(static_cast<double>(d_out));
    for (Index j = 0; j < d_out; ++j)
      for (Index i = 0; i < d_in; ++i) {
        Matrix k = Matrix::Zero(d_out, d_in);
        k(j, i) = s;
        ks.push_back(k);
      }
    return QuantumChannel(d_in, d_out, std::move(ks));
  }

  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  /// Sum_k K rho K^H without validation of the input.
  Matrix apply(const Matrix& rho) const {
    Matrix out = Matrix::Zero(dim_out_, dim_out_);
    for (const auto& k : kraus_) out.noalias() += k * rho * k.adjoint();
    return out;
  }

 private:
  Index dim_in_;
  Index dim_out_;
  std::vector<Matrix> kraus_;
};

// ---------------------------------------------------------------------------
// partial traces

/// Partial trace of an operator on a multipartite space with the given local dims.
/// `keep` lists the retained subsystems in increasing order.
inline Matrix partial_trace(const Matrix& op, const std::vector<Index>& dims, const std::vector<int>& keep) {
  Index total = 1;
  for (Index d : dims) total *= d;
  if (op.rows() != total || op.cols() != total) {
    throw InvariantError("partial_trace: operator size does not match subsystem dims");
  }
  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) {
    if (k < 0 || static_cast<size_t>(k) >= dims.size()) throw InvariantError("partial_trace: bad subsystem index");
    kept[static_cast<size_t>(k)] = true;
  }
  Index kept_dim = 1;
  Index traced_dim = 1;
  for (size_t s = 0; s < dims.size(); ++s) (kept[s] ? kept_dim : traced_dim) *= dims[s];

  // groups[t] holds (full index, kept index) pairs sharing traced index t
  std::vector<std::vector<std::pair<Index, Index>>> groups(static_cast<size_t>(traced_dim));
  for (Index i = 0; i < total; ++i) {
    Index rem = i;
    Index k_idx = 0, k_stride = 1, t_idx = 0, t_stride = 1;
    for (size_t s = dims.size(); s-- > 0;) {
      const Index digit = rem % dims[s];
      rem /= dims[s];
      if (kept[s]) {
        k_idx += digit * k_stride;
        k_stride *= dims[s];
      } else {
        t_idx += digit * t_stride;
        t_stride *= dims[s];
      }
    }
    groups[static_cast<size_t>(t_idx)].emplace_back(i, k_idx);
  }
  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  for (const auto& g : groups)
    for (const auto& [i, ki] : g)
      for (const auto& [j, kj] : g) out(ki, kj) += op(i, j);
  return out;
}

/// tr_B of an operator on C^m (x) C^n.
inline Matrix trace_out_b(const Matrix& op, Index m, Index n) {
  Matrix out = Matrix::Zero(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index a2 = 0; a2 < m; ++a2) {
      cplx s = 0.0;
      for (Index b = 0; b < n; ++b) s += op(a * n + b, a2 * n + b);
      out(a, a2) = s;
    }
  return out;
}

/// tr_A of an operator on C^m (x) C^n.
inline Matrix trace_out_a(const Matrix& op, Index m, Index n) {
  Matrix out = Matrix::Zero(n, n);
  for (Index a = 0; a < m; ++a) out += op.block(a * n, a * n, n, n);
  return out;
}

inline DensityMatrix partial_trace(const BipartiteState& state, Subsystem keep) {
  const Matrix& m = state.matrix();
  Matrix r = keep == Subsystem::A ? trace_out_b(m, state.dim_a(), state.dim_b())
                                  : trace_out_a(m, state.dim_a(), state.dim_b());
  return DensityMatrix(hermitize(r));
}

/// Reduced operator of a pure vector |w> on C^m (x) C^n: tr_B |w><w|.
inline Matrix reduced_of_vector(const Vector& w, Index m, Index n) {
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(w.data(), m, n);
  return psi * psi.adjoint();
}

// ---------------------------------------------------------------------------
// purification

/// Pure state on A (x) B (x) C whose C-marginal reproduces a bipartite state.
class TripartitePureState {
 public:
  TripartitePureState(Vector amplitudes, std::array<Index, 3> dims)
      : amps_(std::move(amplitudes)), dims_(dims) {
    if (dims_[0] * dims_[1] * dims_[2] != amps_.size()) {
      throw InvariantError("TripartitePureState: dims do not match vector length");
    }
    if (std::abs(amps_.norm() - 1.0) > tol::kNorm) {
      throw InvariantError("TripartitePureState: unit-norm invariant violated");
    }
  }

  const Vector& amplitudes() const { return amps_; }
  const std::array<Index, 3>& dims() const { return dims_; }
  Index dim_a() const { return dims_[0]; }
  Index dim_b() const { return dims_[1]; }
  Index dim_c() const { return dims_[2]; }

  /// Marginal on the listed subsystems (0 = A, 1 = B, 2 = C).
  Matrix marginal(const std::vector<int>& keep) const {
    const Index ab = dims_[0] * dims_[1];
    if (keep == std::vector<int>{0, 1}) return reduced_of_vector(amps_, ab, dims_[2]);
    if (keep == std::vector<int>{1, 2}) {
      const Index bc = dims_[1] * dims_[2];
      Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(
          amps_.data(), dims_[0], bc);
      return (psi.adjoint() * psi).transpose();
    }
    return partial_trace(projector(amps_), {dims_[0], dims_[1], dims_[2]}, keep);
  }

 private:
  Vector amps_;
  std::array<Index, 3> dims_;
};

/// Eigen-decomposition of a state restricted to eigenvalues above kRank.
struct Spectrum {
  RealVector values;  // descending
  Matrix vectors;     // columns
};

inline Spectrum support_spectrum(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Index d = rho.rows();
  Index r = 0;
  for (Index i = 0; i < d; ++i)
    if (es.eigenvalues()(i) > tol::kRank) ++r;
  Spectrum s{RealVector(r), Matrix(d, r)};
  Index c = 0;
  for (Index i = d; i-- > 0;) {
    if (es.eigenvalues()(i) <= tol::kRank) continue;
    s.values(c) = es.eigenvalues()(i);
    s.vectors.col(c) = es.eigenvectors().col(i);
    ++c;
  }
  return s;
}

inline Index rank(const Matrix& rho) { return support_spectrum(rho).values.size(); }

/// |Psi> = sum_j sqrt(lambda_j) |e_j>_AB |j>_C over the support of rho_AB.
inline TripartitePureState purify(const BipartiteState& state, Index dim_c) {
  const Spectrum sp = support_spectrum(state.matrix());
  const Index r = sp.values.size();
  if (dim_c < r) {
    std::ostringstream os;
    os << "purify: dimC = " << dim_c << " is smaller than rank(rho_AB) = " << r;
    throw InvariantError(os.str());
  }
  const Index ab = state.dim();
  Vector psi = Vector::Zero(ab * dim_c);
  for (Index j = 0; j < r; ++j) {
    const double amp = std::sqrt(sp.values(j));
    for (Index i = 0; i < ab; ++i) psi(i * dim_c + j) = amp * sp.vectors(i, j);
  }
  psi /= psi.norm();
  TripartitePureState out(psi, {state.dim_a(), state.dim_b(), dim_c});
  const double err = (out.marginal({0, 1}) - state.matrix()).cwiseAbs().maxCoeff();
  if (err > 1e-9) {
    std::ostringstream os;
    os << "purify: tr_C round trip error " << err << " exceeds 1e-9";
    throw InternalError(os.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// entropies and norms

inline double von_neumann_entropy(const DensityMatrix& rho) { return entropy_bits(rho.matrix()); }

/// S(rho || sigma) in bits; +infinity when supp(rho) is not inside supp(sigma).
inline ExtendedReal relative_entropy(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows()) throw InvariantError("relative_entropy: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> er(rho);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  const RealVector& lr = er.eigenvalues();
  const RealVector& ls = es.eigenvalues();
  const Matrix overlap = (er.eigenvectors().adjoint() * es.eigenvectors()).cwiseAbs2();
  double cross = 0.0;
  double leak = 0.0;
  for (Index i = 0; i < lr.size(); ++i) {
    if (lr(i) <= tol::kRank) continue;
    for (Index j = 0; j < ls.size(); ++j) {
      const double w = lr(i) * overlap(i, j).real();
      if (ls(j) <= tol::kRank) {
        leak += w;
      } else {
        cross += w * std::log2(ls(j));
      }
    }
  }
  if (leak > tol::kRank) return ExtendedReal::infinity();
  return std::max(0.0, -shannon_bits(lr) - cross);
}

inline ExtendedReal relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return relative_entropy(rho.matrix(), sigma.matrix());
}

/// I(A:B) = S(A) + S(B) - S(AB) from a raw matrix.
inline double mutual_information_bits(const Matrix& rho, Index m, Index n) {
  return entropy_bits(trace_out_b(rho, m, n)) + entropy_bits(trace_out_a(rho, m, n)) - entropy_bits(rho);
}

inline double mutual_information(const BipartiteState& state) {
  return std::max(0.0, mutual_information_bits(state.matrix(), state.dim_a(), state.dim_b()));
}

inline double trace_norm(const Matrix& x) {
  if (x.rows() == x.cols() && hermitian_defect(x) == 0.0) return eigvalsh(x).cwiseAbs().sum();
  Eigen::JacobiSVD<Matrix> svd(x);
  return svd.singularValues().sum();
}

inline double frobenius_norm(const Matrix& x) { return x.norm(); }

// ---------------------------------------------------------------------------
// channels and ensembles

inline DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& state) {
  if (state.dim() != ch.dim_in()) throw InvariantError("apply_channel: state dimension != channel dim_in");
  return DensityMatrix(hermitize(ch.apply(state.matrix())));
}

struct EnsembleMember {
  double weight;
  Matrix state;  // normalized; placeholder (maximally mixed) when weight < 1e-12
  bool placeholder = false;
};

/// Weighted list of states. Weights are checked to form a probability vector.
class Ensemble {
 public:
  explicit Ensemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
    if (members_.empty()) throw InvariantError("Ensemble: no members");
    double total = 0.0;
    for (const auto& m : members_) {
      if (m.weight < -tol::kEnsemble || m.weight > 1.0 + tol::kEnsemble) {
        throw InvariantError("Ensemble: weight outside [0, 1]");
      }
      total += m.weight;
    }
    if (std::abs(total - 1.0) > tol::kTrace) {
      std::ostringstream os;
      os << "Ensemble: weights sum to " << total << ", expected 1";
      throw InvariantError(os.str());
    }
  }

  const std::vector<EnsembleMember>& members() const { return members_; }
  size_t size() const { return members_.size(); }

  Matrix mixture() const {
    Matrix out = Matrix::Zero(members_.front().state.rows(), members_.front().state.cols());
    for (const auto& m : members_) out += m.weight * m.state;
    return out;
  }

  /// max-abs deviation of the weighted sum from `parent`.
  double mixture_error(const Matrix& parent) const { return (mixture() - parent).cwiseAbs().maxCoeff(); }

 private:
  std::vector<EnsembleMember> members_;
};

/// Splits unnormalized members X_i (sum = parent) into weights and normalized states.
inline Ensemble ensemble_from_unnormalized(const std::vector<Matrix>& parts) {
  std::vector<EnsembleMember> members;
  double total = 0.0;
  for (const auto& x : parts) total += x.trace().real();
  for (const auto& x : parts) {
    const double p = x.trace().real() / total;
    if (p < tol::kNegligibleProbability) {
      members.push_back({std::max(p, 0.0), Matrix::Identity(x.rows(), x.cols()) / static_cast<double>(x.rows()), true});
    } else {
      members.push_back({p, hermitize(x / x.trace().real()), false});
    }
  }
  return Ensemble(std::move(members));
}

}  // namespace qdisc
