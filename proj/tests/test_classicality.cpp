#include <gtest/gtest.h>

#include "qdisc/reductions.hpp"

using namespace qdisc;

namespace {

OptimizerConfig cfg(std::uint64_t seed = 1, int starts = 16) {
  OptimizerConfig c;
  c.seed = seed;
  c.starts = starts;
  return c;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix rebuild_cc(const ClassicalityReport& r) {
  const Index m = r.witness_a->cols(), n = r.witness_b->cols();
  Matrix out = Matrix::Zero(m * n, m * n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      out += (*r.weights)(i, j) * kron(projector(r.witness_a->col(i)), projector(r.witness_b->col(j)));
  return out;
}

}  // namespace

TEST(QuantumClassical, ClassicallyCorrelatedDiagonal) {
  Matrix cc = Matrix::Zero(4, 4);
  cc(0, 0) = cc(3, 3) = 0.5;
  const ClassicalityReport r = is_quantum_classical(BipartiteState(cc, 2, 2));
  EXPECT_TRUE(r.classical);
  ASSERT_TRUE(r.witness_b.has_value());
  EXPECT_LT(max_abs(r.witness_b->cwiseAbs() - Matrix::Identity(2, 2).cwiseAbs()), 1e-12);
}

TEST(QuantumClassical, BellIsNotClassical) {
  const ClassicalityReport r = is_quantum_classical(bell_state());
  EXPECT_FALSE(r.classical);
  EXPECT_GT(std::max(r.max_commutator_norm, r.max_normality_defect), 0.1);
  EXPECT_FALSE(r.witness_b.has_value());
}

TEST(QuantumClassical, RandomQcStatesAndDephasingWitness) {
  Rng rng = make_rng(71);
  for (int t = 0; t < 10; ++t) {
    const Index m = 2 + t % 2, n = 2 + (t / 2) % 2;
    const BipartiteState s = random_qc_state(m, n, rng).state;
    const ClassicalityReport r = is_quantum_classical(s);
    ASSERT_TRUE(r.classical) << "case " << t;
    EXPECT_LT(max_abs(dephase_b(s.matrix(), m, *r.witness_b) - s.matrix()), 1e-9);
  }
}

TEST(QuantumClassical, AgreesWithZeroDiscord) {
  Rng rng = make_rng(72);
  const BipartiteState qc = random_qc_state(2, 2, rng).state;
  EXPECT_LE(discord(qc, MeasurementKind::VonNeumann, cfg()).value, 1e-6);
  const BipartiteState haar(random_density_matrix(4, 4, rng), 2, 2);
  EXPECT_FALSE(is_quantum_classical(haar).classical);
  EXPECT_GT(discord(haar, MeasurementKind::VonNeumann, cfg()).value, 1e-5);
}

TEST(ClassicalClassical, DiagonalAndQcButNotCc) {
  Matrix d = Matrix::Zero(4, 4);
  d(0, 0) = 0.1;
  d(1, 1) = 0.2;
  d(2, 2) = 0.3;
  d(3, 3) = 0.4;
  EXPECT_TRUE(is_classical_classical(BipartiteState(d, 2, 2)).classical);

  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Matrix qc = 0.5 * kron(projector(basis_vector(2, 0)), projector(basis_vector(2, 0))) +
                    0.5 * kron(projector(plus), projector(basis_vector(2, 1)));
  const BipartiteState s(qc, 2, 2);
  EXPECT_TRUE(is_quantum_classical(s).classical);
  EXPECT_FALSE(is_classical_classical(s).classical);
}

TEST(ClassicalClassical, GeneratorRoundTrip) {
  Rng rng = make_rng(73);
  for (int t = 0; t < 10; ++t) {
    const ClassicalClassicalSample smp = random_cc_state(2, 3, rng);
    const ClassicalityReport r = is_classical_classical(smp.state);
    ASSERT_TRUE(r.classical);
    EXPECT_LT(max_abs(rebuild_cc(r) - smp.state.matrix()), 1e-8);
    std::vector<double> got(r.weights->data(), r.weights->data() + r.weights->size());
    std::vector<double> want(smp.weights.data(), smp.weights.data() + smp.weights.size());
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-8);
  }
}

TEST(ExtensionGap, DefaultDimsRespectCap) {
  EXPECT_EQ(default_extension_dims(2, 2), std::make_pair(Index{4}, Index{4}));
  const auto e = default_extension_dims(2, 3);
  EXPECT_LE(2 * 3 * e.first * e.second, kExtensionDimensionCap);
  EXPECT_THROW(cc_in_extension_gap(bell_state(), {5, 5}, cfg()), InvariantError);
  EXPECT_THROW(cc_in_extension_gap(bell_state(), {0, 2}, cfg()), InvariantError);
}

TEST(ExtensionGap, CcStateWithTrivialExtension) {
  Rng rng = make_rng(74);
  const BipartiteState s = random_cc_state(2, 2, rng).state;
  EXPECT_LE(cc_in_extension_gap(s, {1, 1}, cfg()).value, 1e-8);
}

TEST(ExtensionGap, SeparableStateHasCcExtension) {
  Rng rng = make_rng(75);
  const BipartiteState s = random_separable_ansatz(2, 2, 2, rng).state();
  const MeasureResult r = cc_in_extension_gap(s, {2, 2}, cfg());
  EXPECT_LE(r.value, 1e-4);
  const ClassicalExtension& cert = std::get<ClassicalExtension>(r.certificate);
  const BipartiteState ext(hermitize(cert.full()), 4, 4);
  EXPECT_TRUE(is_classical_classical(ext).classical);
  EXPECT_NEAR(trace_norm(hermitize(cert.reduced() - s.matrix())), r.value, 1e-12);
}

TEST(ExtensionGap, BellGapDominatesFrobeniusDistance) {
  const double frob = distance_to_separable(bell_state(), NormKind::Frobenius, 4, cfg()).value;
  const MeasureResult gap = cc_in_extension_gap(bell_state(), {2, 2}, cfg());
  EXPECT_GE(gap.value, frob - 1e-3);
  EXPECT_EQ(gap.bound, BoundDirection::Upper);
}
