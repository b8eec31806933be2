#pragma once

// Correlation and entanglement measures as optimization problems. Every
// optimization-based value is a one-sided bound attained by the returned
// certificate: infima are reported from above, suprema from below.

#include <variant>

#include "qdisc/measurements.hpp"
#include "qdisc/optimize.hpp"
#include "qdisc/states.hpp"

namespace qdisc {

enum class BoundDirection { Upper, Lower, Exact };

inline const char* to_string(BoundDirection b) {
  switch (b) {
    case BoundDirection::Upper: return "upper";
    case BoundDirection::Lower: return "lower";
    case BoundDirection::Exact: return "exact";
  }
  return "?";
}

/// Extension rho_ABC of a bipartite state; `classical` marks a block-diagonal C register.
struct ExtensionState {
  Matrix rho;
  Index dim_a;
  Index dim_b;
  Index dim_c;
  bool classical;
};

/// Input state together with the pure-state ensemble realising a Holevo quantity.
struct ChannelEnsemble {
  Matrix input;
  Ensemble ensemble;
};

/// Product pure state |a>|b>; as a density matrix it is classical-classical.
struct ProductCertificate {
  Vector a;
  Vector b;
};

/// CC state sum_ij p_ij |alpha_i><alpha_i| (x) |beta_j><beta_j| on (A A') (x) (B B').
struct ClassicalExtension {
  Index dim_a, dim_b, ext_a, ext_b;
  Matrix basis_a;  // columns alpha_i, dimension dim_a * ext_a
  Matrix basis_b;
  Eigen::MatrixXd weights;

  /// tr_{A'B'} of the CC state, on A (x) B.
  Matrix reduced() const {
    std::vector<Matrix> ra, rb;
    for (Index i = 0; i < basis_a.cols(); ++i) ra.push_back(reduced_of_vector(basis_a.col(i), dim_a, ext_a));
    for (Index j = 0; j < basis_b.cols(); ++j) rb.push_back(reduced_of_vector(basis_b.col(j), dim_b, ext_b));
    Matrix out = Matrix::Zero(dim_a * dim_b, dim_a * dim_b);
    for (Index i = 0; i < weights.rows(); ++i)
      for (Index j = 0; j < weights.cols(); ++j)
        if (weights(i, j) != 0.0) out += weights(i, j) * kron(ra[static_cast<size_t>(i)], rb[static_cast<size_t>(j)]);
    return out;
  }

  Matrix full() const {
    Matrix out = Matrix::Zero(basis_a.rows() * basis_b.rows(), basis_a.rows() * basis_b.rows());
    for (Index i = 0; i < weights.rows(); ++i)
      for (Index j = 0; j < weights.cols(); ++j)
        if (weights(i, j) != 0.0) out += weights(i, j) * kron(projector(basis_a.col(i)), projector(basis_b.col(j)));
    return out;
  }
};

using Certificate = std::variant<std::monostate, Measurement, Ensemble, SeparableAnsatz, ExtensionState,
                                 ChannelEnsemble, ProductCertificate, ClassicalExtension>;

struct MeasureResult {
  std::string measure;
  double value = 0.0;
  Certificate certificate;
  OptimizationResult optimizer;
  BoundDirection bound = BoundDirection::Upper;
};

/// 32 starts for problems derived from at most 2x2 states, 128 otherwise.
inline OptimizerConfig default_optimizer_config(Index total_dim) {
  OptimizerConfig cfg;
  cfg.starts = total_dim <= 4 ? 32 : 128;
  return cfg;
}

// ---------------------------------------------------------------------------
// exact quantities

inline MeasureResult mutual_information_result(const BipartiteState& state) {
  MeasureResult r;
  r.measure = "mutual-information";
  r.value = mutual_information(state);
  r.bound = BoundDirection::Exact;
  return r;
}

// ---------------------------------------------------------------------------
// classical correlation and discord

namespace detail {

inline double check_range(double v, double lo, double hi, double slack, const char* what) {
  if (v < lo - slack || v > hi + slack) {
    std::ostringstream os;
    os << what << " = " << v << " outside the guaranteed range [" << lo << ", " << hi << "]";
    throw InternalError(os.str());
  }
  return std::clamp(v, lo, std::max(lo, hi));
}

/// sum_i p_i S(rho_A^i) for rank-1 outcomes |u_i><u_i| on B (columns of `vectors`).
inline double conditional_entropy_rank1(const Matrix& rho, Index m, Index n, const Matrix& vectors) {
  double s = 0.0;
  for (Index i = 0; i < vectors.cols(); ++i) s += weighted_entropy_bits(conditional_a_rank1(rho, m, n, vectors.col(i)));
  return s;
}

/// Columns v_i with v_i v_i^H the POVM elements built from the rows of M.
inline bool povm_vectors(const Matrix& m, Matrix& vectors) {
  Matrix t;
  if (!orthonormalize_columns(m, t)) return false;
  vectors = t.adjoint();
  return true;
}

inline Measurement measurement_from_vectors(MeasurementKind kind, const Matrix& vectors) {
  const Index n = vectors.rows();
  if (kind == MeasurementKind::VonNeumann) return vn_from_unitary(vectors);
  std::vector<Matrix> elems;
  for (Index i = 0; i < vectors.cols(); ++i) elems.push_back(projector(vectors.col(i)));
  return POVM(n, std::move(elems));
}

struct ConditionalEntropyFit {
  double value;
  Matrix vectors;  // rank-1 outcome vectors
  OptimizationResult opt;
};

inline ConditionalEntropyFit minimize_conditional_entropy_vn(const BipartiteState& state, const OptimizerConfig& cfg) {
  const Matrix rho = state.matrix();
  const Index m = state.dim_a(), n = state.dim_b();
  Objective obj{n * n, [rho, m, n](const RealVector& p) {
                  return conditional_entropy_rank1(rho, m, n, unitary_from_params(n, p.data()));
                }};
  OptimizerConfig c = cfg;
  c.initial_points.insert(c.initial_points.begin(), RealVector::Zero(n * n));  // computational basis
  OptimizationResult opt = minimize(obj, c);
  return {opt.best_value, unitary_from_params(n, opt.best_params.data()), opt};
}

inline ConditionalEntropyFit minimize_conditional_entropy_povm(const BipartiteState& state, const OptimizerConfig& cfg,
                                                               const Matrix& vn_vectors) {
  const Matrix rho = state.matrix();
  const Index m = state.dim_a(), n = state.dim_b();
  const Index k = n * n;
  Objective obj{2 * k * n, [rho, m, n, k](const RealVector& p) {
                  Matrix v;
                  if (!povm_vectors(complex_matrix_from_params(k, n, p.data()), v)) return kInfinity;
                  return conditional_entropy_rank1(rho, m, n, v);
                }};
  // The best projective measurement, padded with null rows, is a valid starting POVM.
  Matrix seed = Matrix::Zero(k, n);
  seed.topRows(n) = vn_vectors.adjoint();
  for (Index i = n; i < k; ++i) seed.row(i).setConstant(1e-3);
  OptimizerConfig c = cfg;
  c.initial_points.insert(c.initial_points.begin(), params_from_complex_matrix(seed));
  OptimizationResult opt = minimize(obj, c);
  Matrix v;
  povm_vectors(complex_matrix_from_params(k, n, opt.best_params.data()), v);
  return {opt.best_value, v, opt};
}

}  // namespace detail

/// J(rho_AB | B): S(rho_A) minus the minimal average conditional entropy after measuring B.
/// A lower bound on the supremum over measurements.
inline MeasureResult classical_correlation(const BipartiteState& state, MeasurementKind kind, const OptimizerConfig& cfg) {
  const double s_a = von_neumann_entropy(partial_trace(state, Subsystem::A));
  const double s_b = von_neumann_entropy(partial_trace(state, Subsystem::B));
  detail::ConditionalEntropyFit fit = detail::minimize_conditional_entropy_vn(state, cfg);
  if (kind == MeasurementKind::Povm) {
    detail::ConditionalEntropyFit pf = detail::minimize_conditional_entropy_povm(state, cfg, fit.vectors);
    pf.opt.evaluations += fit.opt.evaluations;
    if (pf.value <= fit.value) {
      fit = std::move(pf);
    } else {
      // The projective optimum is itself a POVM; keep it as the certificate.
      fit.opt.evaluations = pf.opt.evaluations;
    }
  }
  Measurement cert = detail::measurement_from_vectors(kind, fit.vectors);
  const double cond = measure_b(state, cert).average_entropy();
  MeasureResult r;
  r.measure = kind == MeasurementKind::VonNeumann ? "classical-correlation-vn" : "classical-correlation-povm";
  r.value = detail::check_range(s_a - cond, 0.0, std::min(s_a, s_b), 1e-7, "classical correlation");
  r.certificate = std::move(cert);
  r.optimizer = fit.opt;
  r.bound = BoundDirection::Lower;
  return r;
}

/// D(rho_AB | B) = I(rho_AB) - J(rho_AB | B); an upper bound, sharing J's certificate.
inline MeasureResult discord(const BipartiteState& state, MeasurementKind kind, const OptimizerConfig& cfg) {
  MeasureResult j = classical_correlation(state, kind, cfg);
  const double info = mutual_information(state);
  j.measure = kind == MeasurementKind::VonNeumann ? "discord-vn" : "discord-povm";
  j.value = detail::check_range(info - j.value, 0.0, info, 1e-7, "discord");
  j.bound = BoundDirection::Upper;
  return j;
}

// ---------------------------------------------------------------------------
// ensembles from isometries

/// Columns sqrt(lambda_j) |e_j> over the support of rho.
inline Matrix scaled_support(const Matrix& rho) {
  const Spectrum sp = support_spectrum(rho);
  Matrix e = sp.vectors;
  for (Index j = 0; j < e.cols(); ++j) e.col(j) *= std::sqrt(sp.values(j));
  return e;
}

/// Unnormalized ensemble vectors w_i = sum_j V_ij f_j for a k x r isometry V and a
/// factor F = [f_1 .. f_r] with F F^H = rho; returned as the columns of F V^T.
inline Matrix hjw_vectors(const Matrix& factor, const Matrix& isometry) { return factor * isometry.transpose(); }

inline Ensemble pure_ensemble(const Matrix& vectors) {
  std::vector<Matrix> parts;
  for (Index i = 0; i < vectors.cols(); ++i) parts.push_back(projector(vectors.col(i)));
  return ensemble_from_unnormalized(parts);
}

/// Entanglement entropy weighted by the squared norm of an unnormalized vector.
inline double weighted_entanglement(const Vector& w, Index m, Index n) {
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(w.data(), m, n);
  return m <= n ? weighted_entropy_bits(psi * psi.adjoint()) : weighted_entropy_bits(psi.adjoint() * psi);
}

/// sum_i p_i S(tr_B |psi_i><psi_i|) of an ensemble of pure bipartite states.
inline double average_entanglement(const Ensemble& e, Index m, Index n) {
  double s = 0.0;
  for (const auto& mem : e.members())
    if (!mem.placeholder) s += mem.weight * entropy_bits(trace_out_b(mem.state, m, n));
  return s;
}

/// Isometry seed [I_r; 0] reproducing the eigen-ensemble, padded with small noise rows.
inline RealVector eigen_ensemble_params(Index k, Index r) {
  Matrix m = Matrix::Zero(k, r);
  m.topRows(r) = Matrix::Identity(r, r);
  for (Index i = r; i < k; ++i)
    for (Index j = 0; j < r; ++j) m(i, j) = cplx(1e-3 * static_cast<double>((i + j) % 3 + 1), 0.0);
  return params_from_complex_matrix(m);
}

/// Recovers a k x r isometry V with sqrt(p_i)|psi_i> = sum_j V_ij sqrt(lambda_j)|e_j> (up to
/// row phases) from a pure-state ensemble of rho.
inline Matrix isometry_of_ensemble(const Matrix& rho, const Ensemble& e) {
  const Spectrum sp = support_spectrum(rho);
  const Index r = sp.values.size();
  Matrix v(static_cast<Index>(e.size()), r);
  for (size_t i = 0; i < e.size(); ++i) {
    const auto& mem = e.members()[i];
    Eigen::SelfAdjointEigenSolver<Matrix> es(mem.state);
    const Vector psi = es.eigenvectors().col(mem.state.rows() - 1) * std::sqrt(mem.weight);
    for (Index j = 0; j < r; ++j) v(static_cast<Index>(i), j) = sp.vectors.col(j).dot(psi) / std::sqrt(sp.values(j));
  }
  return v;
}

// ---------------------------------------------------------------------------
// entanglement of formation

/// E_F upper bound: minimal average entanglement over k-member pure ensembles of rho,
/// parametrized by k x r isometries acting on the eigen-decomposition.
/// k = 0 selects the sufficient cardinality (mn)^2.
inline MeasureResult eof(const BipartiteState& state, Index k, const OptimizerConfig& cfg) {
  const Index m = state.dim_a(), n = state.dim_b();
  const Matrix factor = scaled_support(state.matrix());
  const Index r = factor.cols();
  if (k == 0) k = m * n * m * n;
  if (k < r) {
    std::ostringstream os;
    os << "eof: ensemble size k = " << k << " is smaller than rank(rho) = " << r;
    throw InvariantError(os.str());
  }
  Objective obj{2 * k * r, [factor, m, n, k, r](const RealVector& p) {
                  Matrix v;
                  if (!orthonormalize_columns(complex_matrix_from_params(k, r, p.data()), v)) return kInfinity;
                  const Matrix w = hjw_vectors(factor, v);
                  double s = 0.0;
                  for (Index i = 0; i < w.cols(); ++i) s += weighted_entanglement(w.col(i), m, n);
                  return s;
                }};
  OptimizerConfig c = cfg;
  c.initial_points.insert(c.initial_points.begin(), eigen_ensemble_params(k, r));
  OptimizationResult opt = minimize(obj, c);
  Matrix v;
  orthonormalize_columns(complex_matrix_from_params(k, r, opt.best_params.data()), v);
  Ensemble ens = pure_ensemble(hjw_vectors(factor, v));
  MeasureResult res;
  res.measure = "eof";
  res.value = std::max(0.0, average_entanglement(ens, m, n));
  res.certificate = std::move(ens);
  res.optimizer = opt;
  res.bound = BoundDirection::Upper;
  return res;
}

// ---------------------------------------------------------------------------
// separable ansatz: relative entropy of entanglement and distance to S

namespace detail {

inline Index ansatz_term_size(Index m, Index n) { return 1 + 2 * m + 2 * n; }

/// Per term: weight amplitude w (q = w^2 / sum w^2), then (re, im) of a and of b.
inline SeparableAnsatz ansatz_from_params(Index m, Index n, Index k, const double* p) {
  const Index ts = ansatz_term_size(m, n);
  double total = 0.0;
  for (Index i = 0; i < k; ++i) total += p[i * ts] * p[i * ts];
  std::vector<SeparableAnsatz::Term> terms;
  for (Index i = 0; i < k; ++i) {
    const double* t = p + i * ts;
    Vector a(m), b(n);
    for (Index x = 0; x < m; ++x) a(x) = cplx(t[1 + 2 * x], t[2 + 2 * x]);
    for (Index y = 0; y < n; ++y) b(y) = cplx(t[1 + 2 * m + 2 * y], t[2 + 2 * m + 2 * y]);
    if (a.norm() == 0.0) a(0) = 1.0;
    if (b.norm() == 0.0) b(0) = 1.0;
    const double q = total > 0.0 ? t[0] * t[0] / total : 1.0 / static_cast<double>(k);
    terms.push_back({q, a.normalized(), b.normalized()});
  }
  return SeparableAnsatz(m, n, std::move(terms));
}

/// Fast assembly without constructing the validated ansatz object.
inline Matrix ansatz_matrix(Index m, Index n, Index k, const double* p) {
  const Index ts = ansatz_term_size(m, n);
  double total = 0.0;
  for (Index i = 0; i < k; ++i) total += p[i * ts] * p[i * ts];
  Matrix s = Matrix::Zero(m * n, m * n);
  Vector a(m), b(n);
  for (Index i = 0; i < k; ++i) {
    const double* t = p + i * ts;
    for (Index x = 0; x < m; ++x) a(x) = cplx(t[1 + 2 * x], t[2 + 2 * x]);
    for (Index y = 0; y < n; ++y) b(y) = cplx(t[1 + 2 * m + 2 * y], t[2 + 2 * m + 2 * y]);
    const double na = a.squaredNorm(), nb = b.squaredNorm();
    if (na == 0.0 || nb == 0.0) continue;
    const double q = total > 0.0 ? t[0] * t[0] / total : 1.0 / static_cast<double>(k);
    const Vector ab = kron(a, b);
    s.noalias() += (q / (na * nb)) * (ab * ab.adjoint());
  }
  return s;
}

inline RealVector params_from_ansatz(const SeparableAnsatz& an) {
  const Index m = an.dim_a(), n = an.dim_b();
  const Index ts = ansatz_term_size(m, n);
  RealVector p(ts * static_cast<Index>(an.terms().size()));
  Index i = 0;
  for (const auto& t : an.terms()) {
    double* d = p.data() + i * ts;
    d[0] = std::sqrt(t.weight);
    for (Index x = 0; x < m; ++x) {
      d[1 + 2 * x] = t.a(x).real();
      d[2 + 2 * x] = t.a(x).imag();
    }
    for (Index y = 0; y < n; ++y) {
      d[1 + 2 * m + 2 * y] = t.b(y).real();
      d[2 + 2 * m + 2 * y] = t.b(y).imag();
    }
    ++i;
  }
  return p;
}

/// Ansatz seed rho_A (x) rho_B written in the product eigenbasis, truncated or padded to k terms.
inline RealVector marginal_product_params(const BipartiteState& state, Index k) {
  const Index m = state.dim_a(), n = state.dim_b();
  Eigen::SelfAdjointEigenSolver<Matrix> ea(trace_out_b(state.matrix(), m, n));
  Eigen::SelfAdjointEigenSolver<Matrix> eb(trace_out_a(state.matrix(), m, n));
  struct T {
    double q;
    Vector a, b;
  };
  std::vector<T> ts;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      ts.push_back({std::max(0.0, ea.eigenvalues()(i)) * std::max(0.0, eb.eigenvalues()(j)), ea.eigenvectors().col(i),
                    eb.eigenvectors().col(j)});
  std::stable_sort(ts.begin(), ts.end(), [](const T& x, const T& y) { return x.q > y.q; });
  const Index ts_size = ansatz_term_size(m, n);
  RealVector p = RealVector::Zero(ts_size * k);
  for (Index i = 0; i < k; ++i) {
    double* d = p.data() + i * ts_size;
    Vector a, b;
    double q;
    if (static_cast<size_t>(i) < ts.size()) {
      a = ts[static_cast<size_t>(i)].a;
      b = ts[static_cast<size_t>(i)].b;
      q = std::max(ts[static_cast<size_t>(i)].q, 1e-8);
    } else {
      a = Vector::Ones(m).normalized();
      b = Vector::Ones(n).normalized();
      q = 1e-8;
    }
    d[0] = std::sqrt(q);
    for (Index x = 0; x < m; ++x) {
      d[1 + 2 * x] = a(x).real();
      d[2 + 2 * x] = a(x).imag();
    }
    for (Index y = 0; y < n; ++y) {
      d[1 + 2 * m + 2 * y] = b(y).real();
      d[2 + 2 * m + 2 * y] = b(y).imag();
    }
  }
  return p;
}

/// -S(rho) - tr(rho log2 sigma), or `penalty` when supp(rho) leaks out of supp(sigma).
struct RelativeEntropyTo {
  Matrix rho;
  double neg_entropy;
  double penalty;

  explicit RelativeEntropyTo(const Matrix& r, double pen = 1e6) : rho(r), neg_entropy(-entropy_bits(r)), penalty(pen) {}

  double operator()(const Matrix& sigma) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
    double cross = 0.0, leak = 0.0;
    for (Index j = 0; j < sigma.rows(); ++j) {
      const Vector s = es.eigenvectors().col(j);
      const double w = s.dot(rho * s).real();
      const double mu = es.eigenvalues()(j);
      if (mu <= tol::kRank) {
        leak += std::max(0.0, w);
        continue;
      }
      cross += w * std::log2(mu);
    }
    if (leak > 0.1 * tol::kRank) return penalty;
    return std::max(0.0, neg_entropy - cross);
  }
};

}  // namespace detail

enum class NormKind { Trace, Frobenius };

inline const char* to_string(NormKind k) { return k == NormKind::Trace ? "trace" : "frobenius"; }

/// inf over k-term separable ansatz states of ||rho - sigma|| (upper bound).
/// k = 0 selects (mn)^2 terms.
inline MeasureResult distance_to_separable(const BipartiteState& state, NormKind norm, Index k,
                                           const OptimizerConfig& cfg) {
  const Index m = state.dim_a(), n = state.dim_b();
  if (k == 0) k = m * n * m * n;
  const Matrix rho = state.matrix();
  const Index arity = detail::ansatz_term_size(m, n) * k;
  OptimizerConfig c = cfg;
  c.initial_points.insert(c.initial_points.begin(), detail::marginal_product_params(state, k));
  Objective frob{arity, [rho, m, n, k](const RealVector& p) {
                   return (rho - detail::ansatz_matrix(m, n, k, p.data())).squaredNorm();
                 }};
  OptimizationResult opt = minimize(frob, c);
  if (norm == NormKind::Trace) {
    Objective tr{arity, [rho, m, n, k](const RealVector& p) {
                   return trace_norm(hermitize(rho - detail::ansatz_matrix(m, n, k, p.data())));
                 }};
    OptimizerConfig c2 = cfg;
    c2.initial_points = {opt.best_params};
    c2.starts = std::max(1, cfg.starts / 4);
    const long prior = opt.evaluations;
    opt = minimize(tr, c2);
    opt.evaluations += prior;
  }
  SeparableAnsatz cert = detail::ansatz_from_params(m, n, k, opt.best_params.data());
  const Matrix diff = hermitize(rho - cert.assemble());
  MeasureResult res;
  res.measure = norm == NormKind::Trace ? "distance-trace" : "distance-frobenius";
  res.value = norm == NormKind::Trace ? trace_norm(diff) : frobenius_norm(diff);
  res.certificate = std::move(cert);
  res.optimizer = opt;
  res.bound = BoundDirection::Upper;
  return res;
}

/// E_R upper bound: inf over k-term separable ansatz states of S(rho || sigma). Starts
/// from a Frobenius fit and the product of marginals; support violations inside the
/// search cost 10^6 bits. k = 0 selects (mn)^2 terms.
inline MeasureResult rel_ent_entanglement(const BipartiteState& state, Index k, const OptimizerConfig& cfg) {
  const Index m = state.dim_a(), n = state.dim_b();
  if (k == 0) k = m * n * m * n;
  if (k > m * n * m * n) throw InvariantError("rel_ent_entanglement: more than (mn)^2 ansatz terms");
  const Matrix rho = state.matrix();
  OptimizerConfig fit_cfg = cfg;
  fit_cfg.starts = std::max(1, cfg.starts / 4);
  const MeasureResult fit = distance_to_separable(state, NormKind::Frobenius, k, fit_cfg);

  const detail::RelativeEntropyTo rel(rho);
  Objective obj{detail::ansatz_term_size(m, n) * k,
                [rel, m, n, k](const RealVector& p) { return rel(detail::ansatz_matrix(m, n, k, p.data())); }};
  OptimizerConfig c = cfg;
  c.initial_points.insert(c.initial_points.begin(),
                          {detail::params_from_ansatz(std::get<SeparableAnsatz>(fit.certificate)),
                           detail::marginal_product_params(state, k)});
  OptimizationResult opt = minimize(obj, c);
  opt.evaluations += fit.optimizer.evaluations;
  SeparableAnsatz cert = detail::ansatz_from_params(m, n, k, opt.best_params.data());
  const ExtendedReal value = relative_entropy(rho, hermitize(cert.assemble()));
  if (value.is_infinite()) throw InfeasibleError("rel_ent_entanglement: no ansatz state contains supp(rho)");
  MeasureResult res;
  res.measure = "rel-ent";
  res.value = value.value();
  res.certificate = std::move(cert);
  res.optimizer = opt;
  res.bound = BoundDirection::Upper;
  return res;
}

// ---------------------------------------------------------------------------
// squashed entanglement upper bounds

inline constexpr Index kDeskDimensionCap = 64;

namespace detail {

/// Entropy of sum_l |phi_l><phi_l| restricted to `keep`, via the smaller Gram factor.
inline double marginal_entropy(const std::vector<Vector>& phis, const std::array<Index, 3>& dims,
                               const std::vector<int>& keep) {
  std::array<bool, 3> kept{false, false, false};
  for (int k : keep) kept[static_cast<size_t>(k)] = true;
  Index kd = 1, td = 1;
  for (size_t s = 0; s < 3; ++s) (kept[s] ? kd : td) *= dims[s];
  Matrix y(kd, td * static_cast<Index>(phis.size()));
  for (size_t l = 0; l < phis.size(); ++l) {
    const Vector& phi = phis[l];
    for (Index a = 0; a < dims[0]; ++a)
      for (Index b = 0; b < dims[1]; ++b)
        for (Index c = 0; c < dims[2]; ++c) {
          const std::array<Index, 3> d{a, b, c};
          Index ki = 0, ti = 0;
          for (size_t s = 0; s < 3; ++s) {
            if (kept[s]) ki = ki * dims[s] + d[s];
            else ti = ti * dims[s] + d[s];
          }
          y(ki, static_cast<Index>(l) * td + ti) = phi((a * dims[1] + b) * dims[2] + c);
        }
  }
  return y.rows() <= y.cols() ? entropy_bits(y * y.adjoint()) : entropy_bits(y.adjoint() * y);
}

struct ExtensionModel {
  Matrix factor;  // ab x r, factor factor^H = rho_AB
  Index m, n, dc, kraus, r;

  /// Vectors (I (x) K_l) |Psi> on A B C for Kraus operators K_l = rows [l dc, (l+1) dc) of V.
  std::vector<Vector> branch_vectors(const Matrix& v) const {
    std::vector<Vector> out;
    const Index ab = m * n;
    for (Index l = 0; l < kraus; ++l) {
      const Matrix phi = factor * v.middleRows(l * dc, dc).transpose();  // ab x dc
      Vector vec(ab * dc);
      for (Index i = 0; i < ab; ++i)
        for (Index c = 0; c < dc; ++c) vec(i * dc + c) = phi(i, c);
      out.push_back(std::move(vec));
    }
    return out;
  }

  /// Unnormalized AB blocks X_c of the C-dephased extension.
  std::vector<Matrix> classical_blocks(const Matrix& v) const {
    std::vector<Matrix> blocks(static_cast<size_t>(dc), Matrix::Zero(m * n, m * n));
    for (Index l = 0; l < kraus; ++l) {
      const Matrix phi = factor * v.middleRows(l * dc, dc).transpose();
      for (Index c = 0; c < dc; ++c) blocks[static_cast<size_t>(c)] += projector(phi.col(c));
    }
    return blocks;
  }

  double half_cmi(const Matrix& v, bool classical) const {
    if (classical) {
      double s = 0.0;
      for (const auto& x : classical_blocks(v)) {
        s += weighted_entropy_bits(trace_out_b(x, m, n)) + weighted_entropy_bits(trace_out_a(x, m, n)) -
             weighted_entropy_bits(x);
      }
      return 0.5 * s;
    }
    const auto phis = branch_vectors(v);
    const std::array<Index, 3> dims{m, n, dc};
    return 0.5 * (marginal_entropy(phis, dims, {0, 2}) + marginal_entropy(phis, dims, {1, 2}) -
                  marginal_entropy(phis, dims, {2}) - marginal_entropy(phis, dims, {0, 1, 2}));
  }

  Matrix extension(const Matrix& v, bool classical) const {
    const Index d = m * n * dc;
    Matrix rho = Matrix::Zero(d, d);
    if (classical) {
      const auto blocks = classical_blocks(v);
      for (Index c = 0; c < dc; ++c)
        for (Index i = 0; i < m * n; ++i)
          for (Index j = 0; j < m * n; ++j) rho(i * dc + c, j * dc + c) = blocks[static_cast<size_t>(c)](i, j);
      return rho;
    }
    for (const auto& phi : branch_vectors(v)) rho += projector(phi);
    return rho;
  }
};

}  // namespace detail

/// 1/2 [S(AC) + S(BC) - S(C) - S(ABC)] of an extension rho_ABC.
inline double half_conditional_mutual_information(const ExtensionState& e) {
  const std::vector<Index> dims{e.dim_a, e.dim_b, e.dim_c};
  const Matrix h = hermitize(e.rho);
  return 0.5 * (entropy_bits(partial_trace(h, dims, {0, 2})) + entropy_bits(partial_trace(h, dims, {1, 2})) -
                entropy_bits(partial_trace(h, dims, {2})) - entropy_bits(h));
}

/// Upper bound on squashed entanglement (or its classical variant) at a fixed extension
/// dimension dC. Extensions are (id_AB (x) Lambda)(|Psi><Psi|) for a purification |Psi> of
/// rho_AB and a channel Lambda: R -> C with `kraus` operators (0 picks ceil(r / dC));
/// the classical variant dephases C in its computational basis.
inline MeasureResult squashed_upper(const BipartiteState& state, Index dim_c, bool classical, const OptimizerConfig& cfg,
                                    Index kraus = 0) {
  const Index m = state.dim_a(), n = state.dim_b();
  if (dim_c < 1) throw InvariantError("squashed_upper: dC must be >= 1");
  if (m * n * dim_c > kDeskDimensionCap) {
    std::ostringstream os;
    os << "squashed_upper: total dimension " << m * n * dim_c << " exceeds the desk-scale cap " << kDeskDimensionCap;
    throw InvariantError(os.str());
  }
  detail::ExtensionModel model{scaled_support(state.matrix()), m, n, dim_c, 0, 0};
  model.r = model.factor.cols();
  model.kraus = kraus > 0 ? kraus : (model.r + dim_c - 1) / dim_c;
  if (model.kraus * dim_c < model.r) throw InvariantError("squashed_upper: too few Kraus operators for an isometry");
  const Index rows = model.kraus * dim_c;
  Objective obj{2 * rows * model.r, [model, rows, classical](const RealVector& p) {
                  Matrix v;
                  if (!orthonormalize_columns(complex_matrix_from_params(rows, model.r, p.data()), v)) return kInfinity;
                  return model.half_cmi(v, classical);
                }};
  OptimizerConfig c = cfg;
  c.initial_points.insert(c.initial_points.begin(), eigen_ensemble_params(rows, model.r));
  if (classical && model.kraus == 1) {
    // One Kraus operator plus dephasing is a pure-state ensemble of dC members, so the
    // E_F optimum with k = dC is a feasible extension.
    const MeasureResult ef = eof(state, dim_c, cfg);
    c.initial_points.insert(c.initial_points.begin(),
                            params_from_complex_matrix(isometry_of_ensemble(state.matrix(), std::get<Ensemble>(ef.certificate))));
  }
  OptimizationResult opt = minimize(obj, c);
  Matrix v;
  orthonormalize_columns(complex_matrix_from_params(rows, model.r, opt.best_params.data()), v);
  ExtensionState ext{model.extension(v, classical), m, n, dim_c, classical};
  MeasureResult res;
  res.measure = classical ? "squashed-classical" : "squashed";
  res.value = std::max(0.0, half_conditional_mutual_information(ext));
  res.certificate = std::move(ext);
  res.optimizer = opt;
  res.bound = BoundDirection::Upper;
  return res;
}

// ---------------------------------------------------------------------------
// Holevo quantities

namespace detail {

inline double average_output_entropy(const QuantumChannel& ch, const Matrix& vectors) {
  double s = 0.0;
  for (Index i = 0; i < vectors.cols(); ++i) s += weighted_entropy_bits(ch.apply(projector(vectors.col(i))));
  return s;
}

}  // namespace detail

/// chi_Phi(rho) = S(Phi(rho)) - min over k-member pure ensembles of rho of sum p_i S(Phi(psi_i)).
/// A lower bound. k = 0 selects n_i^2.
inline MeasureResult constrained_holevo(const QuantumChannel& ch, const DensityMatrix& rho, Index k,
                                        const OptimizerConfig& cfg) {
  if (rho.dim() != ch.dim_in()) throw InvariantError("constrained_holevo: state dimension != channel dim_in");
  const Index ni = ch.dim_in();
  const Matrix factor = scaled_support(rho.matrix());
  const Index r = factor.cols();
  if (k == 0) k = ni * ni;
  if (k < r || k > ni * ni) throw InvariantError("constrained_holevo: need rank(rho) <= k <= n_i^2");
  Objective obj{2 * k * r, [ch, factor, k, r](const RealVector& p) {
                  Matrix v;
                  if (!orthonormalize_columns(complex_matrix_from_params(k, r, p.data()), v)) return kInfinity;
                  return detail::average_output_entropy(ch, hjw_vectors(factor, v));
                }};
  OptimizerConfig c = cfg;
  c.initial_points.insert(c.initial_points.begin(), eigen_ensemble_params(k, r));
  OptimizationResult opt = minimize(obj, c);
  Matrix v;
  orthonormalize_columns(complex_matrix_from_params(k, r, opt.best_params.data()), v);
  const Matrix w = hjw_vectors(factor, v);
  const double out_entropy = entropy_bits(hermitize(ch.apply(rho.matrix())));
  MeasureResult res;
  res.measure = "constrained-holevo";
  res.value = out_entropy - detail::average_output_entropy(ch, w);
  res.certificate = ChannelEnsemble{rho.matrix(), pure_ensemble(w)};
  res.optimizer = opt;
  res.bound = BoundDirection::Lower;
  return res;
}

/// chi_Phi = sup_rho chi_Phi(rho), searched jointly over a factor F (rho = F F^H / tr) and
/// a k x n_i ensemble isometry. A lower bound. k = 0 selects n_i^2.
inline MeasureResult holevo_capacity(const QuantumChannel& ch, const OptimizerConfig& cfg, Index k = 0) {
  const Index ni = ch.dim_in();
  if (k == 0) k = ni * ni;
  if (k < ni) throw InvariantError("holevo_capacity: k must be >= n_i");
  const Index fp = 2 * ni * ni;
  auto decode = [ni, k, fp](const RealVector& p, Matrix& factor, Matrix& v) {
    factor = complex_matrix_from_params(ni, ni, p.data());
    const double nrm = factor.norm();
    if (!(nrm > 1e-12)) return false;
    factor /= nrm;
    return orthonormalize_columns(complex_matrix_from_params(k, ni, p.data() + fp), v);
  };
  Objective obj{fp + 2 * k * ni, [ch, decode](const RealVector& p) {
                  Matrix factor, v;
                  if (!decode(p, factor, v)) return kInfinity;
                  const double out = entropy_bits(hermitize(ch.apply(factor * factor.adjoint())));
                  return -(out - detail::average_output_entropy(ch, hjw_vectors(factor, v)));
                }};
  OptimizerConfig c = cfg;
  RealVector seed(fp + 2 * k * ni);
  seed.head(fp) = params_from_complex_matrix(Matrix::Identity(ni, ni));
  seed.tail(2 * k * ni) = eigen_ensemble_params(k, ni);
  c.initial_points.insert(c.initial_points.begin(), seed);
  OptimizationResult opt = minimize(obj, c);
  Matrix factor, v;
  decode(opt.best_params, factor, v);
  const Matrix input = hermitize(factor * factor.adjoint());
  const Matrix w = hjw_vectors(factor, v);
  MeasureResult res;
  res.measure = "holevo-capacity";
  res.value = std::max(0.0, entropy_bits(hermitize(ch.apply(input))) - detail::average_output_entropy(ch, w));
  res.certificate = ChannelEnsemble{input, pure_ensemble(w)};
  res.optimizer = opt;
  res.bound = BoundDirection::Lower;
  return res;
}

}  // namespace qdisc
