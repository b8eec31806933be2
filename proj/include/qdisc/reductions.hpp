#pragma once

// Promise-problem instances and the polynomial-time maps between them:
// separability -> E_F -> discord / constrained Holevo, separability -> CC-in-K,
// and linear optimization over classical states.

#include "qdisc/classicality.hpp"

namespace qdisc {

namespace detail {
inline void require_positive_gap(double g, const char* who) {
  if (!(g > 0.0) || !std::isfinite(g)) throw InvariantError(std::string(who) + ": gap must be a positive finite number");
}
}  // namespace detail

/// Yes: rho separable. No: Frobenius distance to the separable set >= delta.
struct SeparabilityInstance {
  BipartiteState state;
  double delta;
  std::string provenance;

  SeparabilityInstance(BipartiteState s, double d, std::string prov = {})
      : state(std::move(s)), delta(d), provenance(std::move(prov)) {
    detail::require_positive_gap(delta, "SeparabilityInstance");
  }
};

/// Yes: E_F <= a. No: E_F >= a + eps.
struct EofInstance {
  BipartiteState state;
  double threshold;
  double gap;
  std::string provenance;

  EofInstance(BipartiteState s, double a, double eps, std::string prov = {})
      : state(std::move(s)), threshold(a), gap(eps), provenance(std::move(prov)) {
    detail::require_positive_gap(gap, "EofInstance");
  }
};

/// Yes: D(rho | second factor) <= b. No: >= b + eps. The measured system is the second factor.
struct DiscordInstance {
  BipartiteState state;
  double threshold;
  double gap;
  MeasurementKind kind;
  std::string provenance;

  DiscordInstance(BipartiteState s, double b, double eps, MeasurementKind k, std::string prov = {})
      : state(std::move(s)), threshold(b), gap(eps), kind(k), provenance(std::move(prov)) {
    detail::require_positive_gap(gap, "DiscordInstance");
  }
};

/// Yes: chi_Phi(rho) >= c. No: chi_Phi(rho) <= c - eps.
struct HolevoInstance {
  QuantumChannel channel;
  DensityMatrix input;
  double threshold;
  double gap;
  std::string provenance;

  HolevoInstance(QuantumChannel ch, DensityMatrix in, double c, double eps, std::string prov = {})
      : channel(std::move(ch)), input(std::move(in)), threshold(c), gap(eps), provenance(std::move(prov)) {
    detail::require_positive_gap(gap, "HolevoInstance");
    if (input.dim() != channel.dim_in()) throw InvariantError("HolevoInstance: input dimension != channel dim_in");
  }
};

/// K = { sigma on (A A') (x) (B B') : tr_{A'B'} sigma = rho_AB }. Yes: K meets CC.
/// No: every CC state is at trace distance >= delta from rho_AB.
struct KInstance {
  BipartiteState state;
  Index ext_a;
  Index ext_b;
  double delta;
  std::string provenance;

  KInstance(BipartiteState s, Index ea, Index eb, double d, std::string prov = {})
      : state(std::move(s)), ext_a(ea), ext_b(eb), delta(d), provenance(std::move(prov)) {
    detail::require_positive_gap(delta, "KInstance");
    if (ea < 1 || eb < 1) throw InvariantError("KInstance: extension dims must be >= 1");
    if (state.dim() * ea * eb > kExtensionDimensionCap) throw InvariantError("KInstance: extended dimension exceeds the cap");
  }

  Index extended_dim() const { return state.dim() * ext_a * ext_b; }

  /// tr_{A'B'} of an operator ordered A A' B B'.
  Matrix reduce(const Matrix& extended) const {
    return partial_trace(extended, {state.dim_a(), ext_a, state.dim_b(), ext_b}, {0, 2});
  }

  /// Membership oracle: a valid state whose marginal matches rho_AB within 1e-8 in trace norm.
  bool contains(const Matrix& extended) const {
    if (extended.rows() != extended_dim() || extended.cols() != extended_dim()) return false;
    try {
      DensityMatrix check(extended);
    } catch (const InvariantError&) {
      return false;
    }
    return trace_norm(hermitize(reduce(extended) - state.matrix())) <= 1e-8;
  }
};

// ---------------------------------------------------------------------------

/// eps = delta^2 / (2448 m n ln 2).
inline double sep_to_eof_gap(double delta, Index m, Index n) {
  return delta * delta / (2448.0 * static_cast<double>(m) * static_cast<double>(n) * kLn2);
}

inline EofInstance sep_to_eof(const SeparabilityInstance& inst) {
  return EofInstance(inst.state, 0.0, sep_to_eof_gap(inst.delta, inst.state.dim_a(), inst.state.dim_b()));
}

/// Purifies rho_AB into C and keeps rho_BC, to be measured on C; b = a - S(A) + S(AB).
/// dim_c = 0 selects (mn)^2. Von Neumann instances always use (mn)^2.
inline DiscordInstance eof_to_discord(const EofInstance& inst, Index dim_c = 0,
                                      MeasurementKind kind = MeasurementKind::Povm) {
  const Index m = inst.state.dim_a(), n = inst.state.dim_b();
  const Index full = m * n * m * n;
  if (dim_c == 0) dim_c = full;
  if (kind == MeasurementKind::VonNeumann && dim_c != full) {
    throw InvariantError("eof_to_discord: von Neumann instances require dimC = (mn)^2");
  }
  const TripartitePureState psi = purify(inst.state, dim_c);
  BipartiteState rho_bc(hermitize(psi.marginal({1, 2})), n, dim_c);
  const double s_a = von_neumann_entropy(partial_trace(inst.state, Subsystem::A));
  const double s_ab = von_neumann_entropy(inst.state.rho());
  return DiscordInstance(std::move(rho_bc), inst.threshold - s_a + s_ab, inst.gap, kind);
}

/// Channel reduction: V = [e_1 .. e_r] from the support of sigma_AB, input diag(lambda),
/// Phi(X) = tr_B(V X V^H) with Kraus operators K_b = (I_A (x) <b|) V; c = S(Phi(rho)) - a.
inline HolevoInstance eof_to_holevo(const EofInstance& inst) {
  const Index m = inst.state.dim_a(), n = inst.state.dim_b();
  const Spectrum sp = support_spectrum(inst.state.matrix());
  const Index r = sp.values.size();
  if (r == 0) throw InvariantError("eof_to_holevo: state has rank 0");
  std::vector<Matrix> kraus;
  for (Index b = 0; b < n; ++b) {
    Matrix k(m, r);
    for (Index a = 0; a < m; ++a) k.row(a) = sp.vectors.row(a * n + b);
    kraus.push_back(std::move(k));
  }
  QuantumChannel ch(r, m, std::move(kraus));
  Matrix in = Matrix::Zero(r, r);
  for (Index j = 0; j < r; ++j) in(j, j) = sp.values(j);
  in /= in.trace().real();
  DensityMatrix input(in);
  const double out_entropy = von_neumann_entropy(apply_channel(ch, input));
  return HolevoInstance(std::move(ch), std::move(input), out_entropy - inst.threshold, inst.gap);
}

inline KInstance sep_to_k(const SeparabilityInstance& inst, std::pair<Index, Index> ext) {
  return KInstance(inst.state, ext.first, ext.second, inst.delta);
}

/// CC member sum_i q_i |a_i, i><a_i, i| (x) |b_i, i><b_i, i| of K for a separable
/// decomposition with at most min(m', n') terms, ordered A A' B B'.
inline Matrix cc_extension_of(const SeparableAnsatz& an, std::pair<Index, Index> ext) {
  const Index k = static_cast<Index>(an.terms().size());
  if (k > ext.first || k > ext.second) throw InvariantError("cc_extension_of: extension too small for the decomposition");
  const Index da = an.dim_a() * ext.first, db = an.dim_b() * ext.second;
  Matrix out = Matrix::Zero(da * db, da * db);
  for (Index i = 0; i < k; ++i) {
    const auto& t = an.terms()[static_cast<size_t>(i)];
    const Vector v = kron(kron(t.a, basis_vector(ext.first, i)), kron(t.b, basis_vector(ext.second, i)));
    out += t.weight * projector(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// linear optimization over classical states

namespace detail {

struct ProductLinearProblem {
  Matrix op;
  Index m, n;

  double value(const Vector& a, const Vector& b) const {
    const Vector ab = kron(a, b);
    return ab.dot(op * ab).real();
  }
  Vector best_first(const Vector& b) const {
    Matrix red(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) red(i, j) = b.dot(op.block(i * n, j * n, n, n) * b);
    return top_eigenvector(red);
  }
  Vector best_second(const Vector& a) const {
    Matrix red = Matrix::Zero(n, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) red += std::conj(a(i)) * a(j) * op.block(i * n, j * n, n, n);
    return top_eigenvector(red);
  }
  Vector random_first(Rng& rng) const { return random_pure_state(m, rng).amplitudes(); }

  static Vector top_eigenvector(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
    return es.eigenvectors().col(h.rows() - 1);
  }
};

}  // namespace detail

/// max over classical-classical states of tr(rho O), computed over product pure states by
/// alternating exact eigenvector updates. The maxima over CC, QC and separable states
/// coincide. A lower bound on the maximum.
inline MeasureResult linopt_classical(const Matrix& op, Index m, Index n, const OptimizerConfig& cfg) {
  if (op.rows() != m * n || op.cols() != m * n) throw InvariantError("linopt_classical: operator dimension != m n");
  if (hermitian_defect(op) > tol::kHermitian) throw InvariantError("linopt_classical: Hermitian invariant violated");
  const detail::ProductLinearProblem problem{hermitize(op), m, n};
  SeesawResult s = seesaw(problem, cfg);
  MeasureResult res;
  res.measure = "linopt-classical";
  res.value = s.summary.best_value;
  res.certificate = ProductCertificate{s.first, s.second};
  res.optimizer = std::move(s.summary);
  res.bound = BoundDirection::Lower;
  return res;
}

/// tr(sigma O) for the product certificate written out as a CC density matrix.
inline double linopt_certificate_value(const Matrix& op, const ProductCertificate& c) {
  const Matrix sigma = kron(projector(c.a), projector(c.b));
  return (sigma * op).trace().real();
}

/// Qubit state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
inline Vector bloch_vector(double theta, double phi) {
  Vector v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::polar(std::sin(theta / 2.0), phi);
  return v;
}

/// Two-Bloch-sphere grid reference for the product-state maximum on 2 x 2.
inline OptimizationResult linopt_grid_reference(const Matrix& op, Index points_per_axis, int refine_levels) {
  if (op.rows() != 4) throw InvariantError("linopt_grid_reference: defined for two qubits only");
  Objective obj{4, [op](const RealVector& p) {
                  const Vector ab = kron(bloch_vector(p(0), p(1)), bloch_vector(p(2), p(3)));
                  return -ab.dot(op * ab).real();
                }};
  const double pi = std::numbers::pi;
  GridSpec spec{{{0.0, pi}, {0.0, 2.0 * pi}, {0.0, pi}, {0.0, 2.0 * pi}},
                {points_per_axis, points_per_axis, points_per_axis, points_per_axis},
                refine_levels,
                4};
  OptimizationResult r = grid_oracle(obj, spec);
  r.best_value = -r.best_value;
  return r;
}

}  // namespace qdisc
