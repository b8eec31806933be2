#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qdisc/reductions.hpp"

using namespace qdisc;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(DensityMatrix, RejectsEachInvariant) {
  Matrix m = diag2(0.5, 0.5);
  m(0, 1) = 0.1;
  EXPECT_THROW({ DensityMatrix d(m); }, InvariantError);
  EXPECT_THROW({ DensityMatrix d(diag2(0.6, 0.6)); }, InvariantError);
  EXPECT_THROW({ DensityMatrix d(diag2(1.2, -0.2)); }, InvariantError);
  try {
    DensityMatrix d(diag2(1.2, -0.2));
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("PSD"), std::string::npos);
  }
  EXPECT_NO_THROW({ DensityMatrix d(diag2(1.0 + 5e-10, -5e-10)); });
}

TEST(PartialTrace, ProductFactorizes) {
  Rng rng = make_rng(3);
  const DensityMatrix a = random_density_matrix(2, 2, rng);
  const DensityMatrix b = random_density_matrix(3, 3, rng);
  const BipartiteState s = product_state(a, b);
  EXPECT_LT((partial_trace(s, Subsystem::A).matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((partial_trace(s, Subsystem::B).matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
  const Matrix ra = partial_trace(bell_state(), Subsystem::A).matrix();
  EXPECT_LT((ra - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PartialTrace, MatchesIndexLoopOn2x3) {
  Rng rng = make_rng(11);
  const BipartiteState s(random_density_matrix(6, 6, rng), 2, 3);
  const Matrix lib = partial_trace(s, Subsystem::B).matrix();
  EXPECT_LT((lib - oracle::trace_out_a_loop(s.matrix(), 2, 3)).cwiseAbs().maxCoeff(), 1e-13);
  const Matrix lib_a = partial_trace(s, Subsystem::A).matrix();
  EXPECT_LT((lib_a - oracle::trace_out_b_loop(s.matrix(), 2, 3)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(PartialTrace, GeneralGroupingAgreesWithBipartite) {
  Rng rng = make_rng(5);
  const Matrix rho = random_density_matrix(12, 12, rng).matrix();
  // A (x) B (x) C with dims 2, 3, 2; keep A and C.
  const Matrix ac = partial_trace(rho, {2, 3, 2}, {0, 2});
  Matrix ref = Matrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int c2 = 0; c2 < 2; ++c2)
          for (int b = 0; b < 3; ++b) ref(a * 2 + c, a2 * 2 + c2) += rho((a * 3 + b) * 2 + c, (a2 * 3 + b) * 2 + c2);
  EXPECT_LT((ac - ref).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(PartialTrace, DimensionMismatchThrows) {
  EXPECT_THROW(BipartiteState(DensityMatrix::maximally_mixed(4), 2, 3), InvariantError);
}

TEST(Purify, PureInputWithTrivialC) {
  Rng rng = make_rng(2);
  const PureState phi = random_pure_state(4, rng);
  const BipartiteState s(DensityMatrix::from_pure(phi.amplitudes()), 2, 2);
  const TripartitePureState psi = purify(s, 1);
  EXPECT_NEAR(std::abs(psi.amplitudes().dot(phi.amplitudes())), 1.0, 1e-12);
}

TEST(Purify, MaximallyMixedQubitGivesEqualSchmidtWeights) {
  const BipartiteState s(DensityMatrix::maximally_mixed(2), 1, 2);
  const TripartitePureState psi = purify(s, 2);
  const RealVector w = eigvalsh(psi.marginal({2}));
  EXPECT_NEAR(w(0), 0.5, 1e-12);
  EXPECT_NEAR(w(1), 0.5, 1e-12);
}

TEST(Purify, RoundTripAndRankGuard) {
  Rng rng = make_rng(21);
  const BipartiteState s(random_density_matrix(4, 2, rng), 2, 2);
  const TripartitePureState psi = purify(s, 16);
  EXPECT_LT((psi.marginal({0, 1}) - s.matrix()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_THROW(purify(s, 1), InvariantError);
}

TEST(Entropy, ReferenceValues) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::from_pure(basis_vector(3, 1))), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(2)), 1.0, 1e-12);
  const double ref = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(diag2(0.75, 0.25))), ref, 1e-12);
  EXPECT_NEAR(ref, 0.8112781244591328, 1e-15);
}

TEST(Entropy, AdditiveOnProducts) {
  Rng rng = make_rng(8);
  const DensityMatrix a = random_density_matrix(2, 2, rng), b = random_density_matrix(3, 2, rng);
  EXPECT_NEAR(von_neumann_entropy(product_state(a, b).rho()), von_neumann_entropy(a) + von_neumann_entropy(b), 1e-9);
}

TEST(RelativeEntropy, ReferenceValuesAndSupport) {
  Rng rng = make_rng(4);
  const DensityMatrix r = random_density_matrix(3, 3, rng);
  EXPECT_NEAR(relative_entropy(r, r).value(), 0.0, 1e-10);
  const DensityMatrix zero(diag2(1.0, 0.0));
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  EXPECT_NEAR(relative_entropy(zero, mixed).value(), 1.0, 1e-12);
  EXPECT_TRUE(relative_entropy(mixed, zero).is_infinite());
  EXPECT_THROW(relative_entropy(mixed, zero).value(), std::exception);
  EXPECT_THROW(relative_entropy(mixed.matrix(), r.matrix()), InvariantError);
}

TEST(MutualInformation, ReferenceValues) {
  Rng rng = make_rng(1);
  EXPECT_NEAR(mutual_information(random_product_state(2, 3, rng)), 0.0, 1e-9);
  EXPECT_NEAR(mutual_information(bell_state()), 2.0, 1e-12);
  Matrix cc = Matrix::Zero(4, 4);
  cc(0, 0) = cc(3, 3) = 0.5;
  EXPECT_NEAR(mutual_information(BipartiteState(cc, 2, 2)), 1.0, 1e-12);
}

TEST(Norms, ReferenceValues) {
  EXPECT_NEAR(trace_norm(Matrix::Identity(2, 2)), 2.0, 1e-14);
  EXPECT_NEAR(frobenius_norm(Matrix::Identity(2, 2)), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(trace_norm(diag2(1.0, -1.0)), 2.0, 1e-14);
  Rng rng = make_rng(9);
  for (int t = 0; t < 20; ++t) {
    const Matrix h = random_hermitian(5, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    EXPECT_NEAR(trace_norm(h), es.eigenvalues().cwiseAbs().sum(), 1e-10);
    const Matrix g = gaussian_matrix(4, 4, rng);
    EXPECT_LE(frobenius_norm(g), trace_norm(g) + 1e-12);
  }
}

TEST(Norms, TraceNormNonIncreasingUnderPartialTrace) {
  Rng rng = make_rng(10);
  for (int t = 0; t < 50; ++t) {
    const Matrix x = random_hermitian(6, rng);
    EXPECT_LE(trace_norm(trace_out_b(x, 2, 3)), trace_norm(x) + 1e-12);
  }
}

TEST(Random, DeterministicAndPure) {
  const DensityMatrix p = random_density_matrix(2, 1, 7);
  EXPECT_NEAR(von_neumann_entropy(p), 0.0, 1e-9);
  const DensityMatrix a = random_density_matrix(4, 3, 99), b = random_density_matrix(4, 3, 99);
  EXPECT_TRUE((a.matrix().array() == b.matrix().array()).all());
  const PureState u = random_pure_state(5, 3), v = random_pure_state(5, 3);
  EXPECT_TRUE((u.amplitudes().array() == v.amplitudes().array()).all());
  EXPECT_THROW(random_density_matrix(2, 3, 1), InvariantError);
  EXPECT_THROW(random_density_matrix(2, 0, 1), InvariantError);
}

TEST(Random, MeanEigenvalueMonteCarlo) {
  Rng rng = make_rng(1);
  double total = 0.0;
  for (int t = 0; t < 1000; ++t) total += eigvalsh(random_density_matrix(4, 4, rng).matrix()).mean();
  EXPECT_NEAR(total / 1000.0, 0.25, 0.02);
  // The trace fixes the mean; the largest eigenvalue is a sharper check. For Hilbert-Schmidt
  // qubit states the spectrum density is proportional to (l1 - l2)^2, so r = l1 - l2 has density
  // 3 r^2 on [0, 1] and E[l_max] = (1 + 3/4) / 2.
  Rng rng2 = make_rng(2);
  double top = 0.0;
  for (int t = 0; t < 1000; ++t) top += eigvalsh(random_density_matrix(2, 2, rng2).matrix())(1);
  EXPECT_NEAR(top / 1000.0, 0.875, 0.01);
}

TEST(Random, UnitaryIsUnitary) {
  Rng rng = make_rng(12);
  const Matrix u = random_unitary(5, rng);
  EXPECT_LT((u.adjoint() * u - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Channel, IdentityDepolarizingAndEmbedded) {
  Rng rng = make_rng(13);
  const DensityMatrix r = random_density_matrix(3, 3, rng);
  EXPECT_LT((apply_channel(QuantumChannel::identity(3), r).matrix() - r.matrix()).cwiseAbs().maxCoeff(), 1e-13);
  const Matrix dep = apply_channel(QuantumChannel::fully_depolarizing(3, 2), r).matrix();
  EXPECT_LT((dep - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-12);

  const BipartiteState sigma(random_density_matrix(4, 3, rng), 2, 2);
  const HolevoInstance h = eof_to_holevo(EofInstance(sigma, 0.0, 1.0));
  const Matrix out = apply_channel(h.channel, h.input).matrix();
  EXPECT_LT((out - oracle::trace_out_b_loop(sigma.matrix(), 2, 2)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(apply_channel(h.channel, DensityMatrix::maximally_mixed(2)), InvariantError);
}

TEST(Channel, RejectsIncompleteKraus) {
  EXPECT_THROW(QuantumChannel(2, 2, {Matrix::Identity(2, 2) * 0.9}), InvariantError);
}

TEST(ExtendedRealTest, Sentinel) {
  const ExtendedReal inf = ExtendedReal::infinity();
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_EQ(inf.value_or(-1.0), -1.0);
  EXPECT_EQ(ExtendedReal(2.5).value(), 2.5);
}
