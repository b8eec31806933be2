#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qdisc/measures.hpp"

using namespace qdisc;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(VonNeumann, ValidatesProjectors) {
  const Matrix p0 = projector(basis_vector(2, 0)), p1 = projector(basis_vector(2, 1));
  EXPECT_NO_THROW(VonNeumannMeasurement(2, {p0, p1}));
  EXPECT_THROW(VonNeumannMeasurement(2, {p0}), InvariantError);
  EXPECT_THROW(VonNeumannMeasurement(2, {p0, p0}), InvariantError);
  EXPECT_THROW(VonNeumannMeasurement(2, {0.5 * Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2)}), InvariantError);
}

TEST(Povm, ValidatesElements) {
  const Matrix half = 0.5 * Matrix::Identity(2, 2);
  EXPECT_NO_THROW(POVM(2, {half, half}));
  EXPECT_THROW(POVM(2, std::vector<Matrix>(5, 0.2 * Matrix::Identity(2, 2))), InvariantError);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = 1.0;
  Matrix rest = Matrix::Identity(2, 2) - neg;
  EXPECT_THROW(POVM(2, {neg, rest}), InvariantError);
  EXPECT_THROW(POVM(2, {half}), InvariantError);
}

TEST(MeasureB, BellInComputationalBasis) {
  const Measurement z = vn_from_unitary(Matrix::Identity(2, 2));
  const MeasurementOutcomeSet out = measure_b(bell_state(), z);
  ASSERT_EQ(out.outcomes().size(), 2u);
  for (const auto& o : out.outcomes()) EXPECT_NEAR(o.probability, 0.5, 1e-12);
  EXPECT_NEAR(out.average_entropy(), 0.0, 1e-12);
  EXPECT_LT(max_abs(out.outcomes()[0].state - projector(basis_vector(2, 0))), 1e-12);
}

TEST(MeasureB, ZeroProbabilityOutcomeIsPlaceholder) {
  const BipartiteState s = product_state(DensityMatrix::maximally_mixed(2), DensityMatrix::from_pure(basis_vector(2, 0)));
  const MeasurementOutcomeSet out = measure_b(s, vn_from_unitary(Matrix::Identity(2, 2)));
  EXPECT_FALSE(out.outcomes()[0].placeholder);
  EXPECT_TRUE(out.outcomes()[1].placeholder);
  EXPECT_NEAR(out.average_entropy(), 1.0, 1e-12);
}

TEST(MeasureB, RejectsDimensionMismatch) {
  EXPECT_THROW(measure_b(bell_state(), vn_from_unitary(Matrix::Identity(3, 3))), InvariantError);
}

TEST(MeasureB, ConditionalEntropyMatchesLoopOracle) {
  Rng rng = make_rng(31);
  for (int t = 0; t < 20; ++t) {
    const BipartiteState s(random_density_matrix(6, 6, rng), 3, 2);
    const double theta = std::numbers::pi * uniform01(rng), phi = 2.0 * std::numbers::pi * uniform01(rng);
    Matrix u(2, 2);
    u.col(0) = oracle::bloch(theta, phi);
    u.col(1) = oracle::bloch(std::numbers::pi - theta, phi + std::numbers::pi);
    const double lib = measure_b(s, vn_from_unitary(u)).average_entropy();
    EXPECT_NEAR(lib, oracle::conditional_entropy_qubit_b(s.matrix(), 3, theta, phi), 1e-10);
  }
}

TEST(Parametrization, UnitaryFromParamsIsUnitaryAndInvertible) {
  Rng rng = make_rng(32);
  for (Index n : {2, 3, 4}) {
    RealVector p(n * n);
    for (Index i = 0; i < p.size(); ++i) p(i) = 0.4 * standard_normal(rng);
    const Matrix u = unitary_from_params(n, p.data());
    EXPECT_LT(unitarity_defect(u), 1e-12);
    const RealVector back = params_from_unitary(u);
    EXPECT_LT(max_abs(unitary_from_params(n, back.data()) - u), 1e-10);
  }
}

TEST(Parametrization, HermitianRoundTrip) {
  Rng rng = make_rng(33);
  const Matrix h = random_hermitian(4, rng);
  const RealVector p = params_from_hermitian(h);
  EXPECT_EQ(p.size(), 16);
  EXPECT_LT(max_abs(hermitian_from_params(4, p.data()) - h), 1e-15);
}

TEST(Parametrization, PovmFromMatrixIsComplete) {
  Rng rng = make_rng(34);
  const POVM e = povm_from_matrix(gaussian_matrix(9, 3, rng));
  Matrix sum = Matrix::Zero(3, 3);
  for (const auto& x : e.elements()) sum += x;
  EXPECT_LT(max_abs(sum - Matrix::Identity(3, 3)), 1e-12);
  EXPECT_THROW(povm_from_matrix(gaussian_matrix(10, 3, rng)), InvariantError);
}

TEST(Steering, PovmEnsembleAveragesToMarginal) {
  Rng rng = make_rng(35);
  const BipartiteState s(random_density_matrix(6, 3, rng), 2, 3);
  const TripartitePureState psi = purify(s, 5);
  const Ensemble e = steer_ensemble(psi, povm_from_matrix(gaussian_matrix(20, 5, rng)));
  EXPECT_EQ(e.size(), 20u);
  EXPECT_LT(e.mixture_error(s.matrix()), 1e-10);
  EXPECT_THROW(steer_ensemble(psi, povm_from_matrix(gaussian_matrix(4, 2, rng))), InvariantError);
}

TEST(Steering, HjwRealizesAnyPureEnsemble) {
  Rng rng = make_rng(36);
  for (int t = 0; t < 10; ++t) {
    const Index r = 1 + t % 4, k = r + t % 3;
    const BipartiteState s(random_density_matrix(4, r, rng), 2, 2);
    Matrix v;
    ASSERT_TRUE(orthonormalize_columns(gaussian_matrix(k, r, rng), v));
    const Ensemble target = pure_ensemble(hjw_vectors(scaled_support(s.matrix()), v));
    ASSERT_LT(target.mixture_error(s.matrix()), 1e-10);

    const Matrix recovered = isometry_of_ensemble(s.matrix(), target);
    EXPECT_LT(unitarity_defect(recovered), 1e-9);
    const Index dim_c = k + 1;
    const Ensemble steered = steer_ensemble(purify(s, dim_c), hjw_measurement(recovered, dim_c));
    ASSERT_EQ(steered.size(), static_cast<size_t>(dim_c));
    for (size_t i = 0; i < target.size(); ++i) {
      EXPECT_NEAR(steered.members()[i].weight, target.members()[i].weight, 1e-10);
      if (target.members()[i].weight > 1e-8) {
        EXPECT_LT(max_abs(steered.members()[i].state - target.members()[i].state), 1e-8);
      }
    }
    EXPECT_NEAR(steered.members().back().weight, 0.0, 1e-12);
  }
}

TEST(Steering, HjwRejectsSmallC) {
  EXPECT_THROW(hjw_measurement(Matrix::Identity(3, 3), 2), InvariantError);
  EXPECT_THROW(hjw_measurement(2.0 * Matrix::Identity(2, 2), 2), InvariantError);
}
