#pragma once

// Zero-discord detection. rho = sum_kl |k><l|_A (x) B_kl is quantum-classical on the
// B cut iff the blocks B_kl form a commuting family of normal matrices; the common
// eigenbasis is the measurement that leaves rho invariant.

#include <optional>

#include "qdisc/measures.hpp"

namespace qdisc {

struct ClassicalityReport {
  bool classical = false;
  double max_commutator_norm = 0.0;
  double max_normality_defect = 0.0;
  double tolerance = 0.0;
  std::optional<Matrix> witness_a;  // columns: basis on A (CC test only)
  std::optional<Matrix> witness_b;  // columns: basis on B
  std::optional<Eigen::MatrixXd> weights;  // p_ij in the witness product basis (CC test only)
};

inline constexpr double kClassicalityTolerance = 1e-8;

namespace detail {

inline std::vector<Matrix> operator_blocks(const Matrix& rho, Index m, Index n) {
  std::vector<Matrix> blocks;
  for (Index k = 0; k < m; ++k)
    for (Index l = 0; l < m; ++l) blocks.push_back(rho.block(k * n, l * n, n, n));
  return blocks;
}

/// Largest off-diagonal Frobenius mass of U^H B U over the family.
inline double diagonalization_residual(const std::vector<Matrix>& blocks, const Matrix& u) {
  double worst = 0.0;
  for (const auto& b : blocks) {
    Matrix t = u.adjoint() * b * u;
    t.diagonal().setZero();
    worst = std::max(worst, t.norm());
  }
  return worst;
}

/// Common eigenbasis of a commuting normal family via a random real combination of the
/// Hermitian and anti-Hermitian parts; retried on accidental degeneracy.
inline Matrix common_eigenbasis(const std::vector<Matrix>& blocks, Index n, double tol) {
  Rng rng = make_rng(0x5eed);
  Matrix best = Matrix::Identity(n, n);
  double best_res = diagonalization_residual(blocks, best);
  for (int attempt = 0; attempt < 5 && best_res > 10.0 * tol; ++attempt) {
    Matrix x = Matrix::Zero(n, n);
    for (const auto& b : blocks) {
      x += standard_normal(rng) * (b + b.adjoint()) / 2.0;
      x += standard_normal(rng) * (b - b.adjoint()) / cplx(0.0, 2.0);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(x));
    const double res = diagonalization_residual(blocks, es.eigenvectors());
    if (res < best_res) {
      best_res = res;
      best = es.eigenvectors();
    }
  }
  return best;
}

inline ClassicalityReport block_test(const Matrix& rho, Index m, Index n, double tol) {
  const auto blocks = operator_blocks(rho, m, n);
  ClassicalityReport r;
  r.tolerance = tol;
  for (const auto& b : blocks) r.max_normality_defect = std::max(r.max_normality_defect, (b * b.adjoint() - b.adjoint() * b).norm());
  for (size_t i = 0; i < blocks.size(); ++i)
    for (size_t j = i + 1; j < blocks.size(); ++j)
      r.max_commutator_norm = std::max(r.max_commutator_norm, (blocks[i] * blocks[j] - blocks[j] * blocks[i]).norm());
  r.classical = r.max_commutator_norm <= tol && r.max_normality_defect <= tol;
  if (r.classical) r.witness_b = common_eigenbasis(blocks, n, tol);
  return r;
}

/// Same state with the tensor factors exchanged (B (x) A ordering).
inline Matrix swap_subsystems(const Matrix& rho, Index m, Index n) {
  Matrix out(rho.rows(), rho.cols());
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index a2 = 0; a2 < m; ++a2)
        for (Index b2 = 0; b2 < n; ++b2) out(b * m + a, b2 * m + a2) = rho(a * n + b, a2 * n + b2);
  return out;
}

}  // namespace detail

/// Sum_i (I (x) P_i) rho (I (x) P_i) for the projectors onto the columns of `basis_b`.
inline Matrix dephase_b(const Matrix& rho, Index m, const Matrix& basis_b) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (Index i = 0; i < basis_b.cols(); ++i) {
    const Matrix p = kron(Matrix::Identity(m, m), projector(basis_b.col(i)));
    out += p * rho * p;
  }
  return out;
}

inline ClassicalityReport is_quantum_classical(const BipartiteState& state, double tol = kClassicalityTolerance) {
  return detail::block_test(state.matrix(), state.dim_a(), state.dim_b(), tol);
}

/// Quantum-classical on both cuts; the two witness bases diagonalize rho jointly.
inline ClassicalityReport is_classical_classical(const BipartiteState& state, double tol = kClassicalityTolerance) {
  const Index m = state.dim_a(), n = state.dim_b();
  ClassicalityReport b_side = detail::block_test(state.matrix(), m, n, tol);
  ClassicalityReport a_side = detail::block_test(detail::swap_subsystems(state.matrix(), m, n), n, m, tol);
  ClassicalityReport r;
  r.tolerance = tol;
  r.max_commutator_norm = std::max(b_side.max_commutator_norm, a_side.max_commutator_norm);
  r.max_normality_defect = std::max(b_side.max_normality_defect, a_side.max_normality_defect);
  r.classical = b_side.classical && a_side.classical;
  if (r.classical) {
    r.witness_a = a_side.witness_b;
    r.witness_b = b_side.witness_b;
    Eigen::MatrixXd p(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) {
        const Vector ab = kron(Vector(r.witness_a->col(i)), Vector(r.witness_b->col(j)));
        p(i, j) = std::max(0.0, ab.dot(state.matrix() * ab).real());
      }
    r.weights = p;
  }
  return r;
}

// ---------------------------------------------------------------------------
// classical states inside the extension set K

inline constexpr Index kExtensionDimensionCap = 64;

/// Largest equal extension m' = n' with (m m')(n n') within the cap.
inline std::pair<Index, Index> default_extension_dims(Index m, Index n) {
  Index e = 1;
  while ((e + 1) * (e + 1) * m * n <= kExtensionDimensionCap) ++e;
  return {e, e};
}

namespace detail {

struct CCExtensionModel {
  Index m, n, ea, eb;
  Index da() const { return m * ea; }
  Index db() const { return n * eb; }
  Index arity() const { return da() * da() + db() * db() + da() * db(); }

  ClassicalExtension decode(const RealVector& p) const {
    ClassicalExtension x{m, n, ea, eb, unitary_from_params(da(), p.data()),
                         unitary_from_params(db(), p.data() + da() * da()), Eigen::MatrixXd(da(), db())};
    const double* w = p.data() + da() * da() + db() * db();
    double total = 0.0;
    for (Index i = 0; i < da() * db(); ++i) total += w[i] * w[i];
    for (Index i = 0; i < da(); ++i)
      for (Index j = 0; j < db(); ++j)
        x.weights(i, j) = total > 0.0 ? w[i * db() + j] * w[i * db() + j] / total : 1.0 / static_cast<double>(da() * db());
    return x;
  }

  RealVector encode(const Matrix& ua, const Matrix& ub, const Eigen::MatrixXd& weights) const {
    RealVector p(arity());
    p.head(da() * da()) = params_from_unitary(ua);
    p.segment(da() * da(), db() * db()) = params_from_unitary(ub);
    for (Index i = 0; i < da(); ++i)
      for (Index j = 0; j < db(); ++j) p(da() * da() + db() * db() + i * db() + j) = std::sqrt(std::max(0.0, weights(i, j)));
    return p;
  }
};

/// Unitary whose first columns are the given orthonormal vectors.
inline Matrix complete_basis(const Matrix& cols) {
  const Index k = cols.cols();
  Eigen::HouseholderQR<Matrix> qr(cols);
  Matrix q = qr.householderQ();
  q.leftCols(k) = cols;
  return q;
}

/// CC extension sum_i q_i |a_i, i><a_i, i| (x) |b_i, i><b_i, i| of a separable ansatz with
/// at most min(m', n') terms.
inline RealVector encode_ansatz(const CCExtensionModel& model, const SeparableAnsatz& an) {
  const Index k = static_cast<Index>(an.terms().size());
  Matrix ca(model.da(), k), cb(model.db(), k);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(model.da(), model.db());
  for (Index i = 0; i < k; ++i) {
    const auto& t = an.terms()[static_cast<size_t>(i)];
    ca.col(i) = kron(t.a, basis_vector(model.ea, i));
    cb.col(i) = kron(t.b, basis_vector(model.eb, i));
    w(i, i) = t.weight;
  }
  return model.encode(complete_basis(ca), complete_basis(cb), w);
}

}  // namespace detail

/// min over CC states sigma on (A A') (x) (B B') of ||rho_AB - tr_{A'B'} sigma||_1.
/// Zero certifies that K meets CC. The value is an upper bound on that infimum, which in
/// turn is at least the trace distance from rho to the separable set.
inline MeasureResult cc_in_extension_gap(const BipartiteState& state, std::pair<Index, Index> ext,
                                         const OptimizerConfig& cfg) {
  const Index m = state.dim_a(), n = state.dim_b();
  if (ext.first < 1 || ext.second < 1) throw InvariantError("cc_in_extension_gap: extension dims must be >= 1");
  if (m * ext.first * n * ext.second > kExtensionDimensionCap) {
    std::ostringstream os;
    os << "cc_in_extension_gap: extended dimension " << m * ext.first * n * ext.second << " exceeds the cap "
       << kExtensionDimensionCap;
    throw InvariantError(os.str());
  }
  const detail::CCExtensionModel model{m, n, ext.first, ext.second};
  const Matrix rho = state.matrix();

  OptimizerConfig c = cfg;
  const ClassicalityReport cc = is_classical_classical(state);
  if (cc.classical) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(model.da(), model.db());
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) w(i * ext.first, j * ext.second) = (*cc.weights)(i, j);
    Matrix ca(model.da(), m), cb(model.db(), n);
    for (Index i = 0; i < m; ++i) ca.col(i) = kron(Vector(cc.witness_a->col(i)), basis_vector(ext.first, 0));
    for (Index j = 0; j < n; ++j) cb.col(j) = kron(Vector(cc.witness_b->col(j)), basis_vector(ext.second, 0));
    // Column i * ext of the completed basis must carry alpha_i; permute accordingly.
    Matrix ua = detail::complete_basis(ca), ub = detail::complete_basis(cb);
    Matrix pa(model.da(), model.da()), pb(model.db(), model.db());
    std::vector<Index> order_a, order_b;
    for (Index i = 0, rest = m; i < model.da(); ++i) order_a.push_back(i % ext.first == 0 ? i / ext.first : rest++);
    for (Index j = 0, rest = n; j < model.db(); ++j) order_b.push_back(j % ext.second == 0 ? j / ext.second : rest++);
    for (Index i = 0; i < model.da(); ++i) pa.col(i) = ua.col(order_a[static_cast<size_t>(i)]);
    for (Index j = 0; j < model.db(); ++j) pb.col(j) = ub.col(order_b[static_cast<size_t>(j)]);
    c.initial_points.push_back(model.encode(pa, pb, w));
  }
  const Index terms = std::min(ext.first, ext.second);
  if (terms >= 1) {
    OptimizerConfig fit_cfg = cfg;
    fit_cfg.starts = std::max(1, cfg.starts / 4);
    const MeasureResult fit = distance_to_separable(state, NormKind::Frobenius, terms, fit_cfg);
    c.initial_points.push_back(detail::encode_ansatz(model, std::get<SeparableAnsatz>(fit.certificate)));
  }

  Objective frob{model.arity(), [model, rho](const RealVector& p) { return (rho - model.decode(p).reduced()).squaredNorm(); }};
  OptimizationResult opt = minimize(frob, c);
  Objective tr{model.arity(), [model, rho](const RealVector& p) { return trace_norm(hermitize(rho - model.decode(p).reduced())); }};
  OptimizerConfig c2 = cfg;
  c2.initial_points = {opt.best_params};
  for (const auto& p : c.initial_points) c2.initial_points.push_back(p);
  c2.starts = std::max(static_cast<int>(c2.initial_points.size()), cfg.starts / 4);
  const long prior = opt.evaluations;
  opt = minimize(tr, c2);
  opt.evaluations += prior;

  ClassicalExtension cert = model.decode(opt.best_params);
  MeasureResult res;
  res.measure = "cc-extension-gap";
  res.value = trace_norm(hermitize(rho - cert.reduced()));
  res.certificate = std::move(cert);
  res.optimizer = opt;
  res.bound = BoundDirection::Upper;
  return res;
}

}  // namespace qdisc
