#include <gtest/gtest.h>

#include "qdisc/reductions.hpp"

using namespace qdisc;

namespace {

Objective rosenbrock() {
  return {2, [](const RealVector& x) {
            return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
          }};
}

}  // namespace

TEST(Minimize, Rosenbrock) {
  OptimizerConfig c;
  c.starts = 8;
  c.box = {{-2.0, 2.0}, {-2.0, 2.0}};
  const OptimizationResult r = minimize(rosenbrock(), c);
  EXPECT_LT(r.best_value, 1e-10);
  EXPECT_NEAR(r.best_params(0), 1.0, 1e-4);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.start_values.size(), 8u);
  EXPECT_GT(r.evaluations, 0);
}

TEST(Minimize, MultimodalFindsGlobalMinimum) {
  // Rastrigin in 2D: many local minima, global minimum 0 at the origin.
  Objective f{2, [](const RealVector& x) {
                double s = 20.0;
                for (Index i = 0; i < 2; ++i) s += x(i) * x(i) - 10.0 * std::cos(2.0 * std::numbers::pi * x(i));
                return s;
              }};
  OptimizerConfig c;
  c.starts = 64;
  c.box = {{-3.0, 3.0}, {-3.0, 3.0}};
  EXPECT_LT(minimize(f, c).best_value, 1e-8);
}

TEST(Minimize, InfinityMarksInfeasibleRegion) {
  Objective f{1, [](const RealVector& x) { return x(0) < 0.0 ? kInfinity : (x(0) - 0.5) * (x(0) - 0.5); }};
  OptimizerConfig c;
  c.starts = 6;
  const OptimizationResult r = minimize(f, c);
  EXPECT_NEAR(r.best_params(0), 0.5, 1e-4);
  Objective never{1, [](const RealVector&) { return kInfinity; }};
  EXPECT_THROW(minimize(never, c), InfeasibleError);
}

TEST(Minimize, InitialPointsAreUsed) {
  Objective f{1, [](const RealVector& x) { return std::abs(x(0) - 40.0) < 1e-3 ? -1.0 : 0.0; }};
  OptimizerConfig c;
  c.starts = 2;
  c.polish = false;
  c.initial_points = {RealVector::Constant(1, 40.0)};
  EXPECT_EQ(minimize(f, c).best_value, -1.0);
}

TEST(Minimize, DeterministicAcrossThreadCounts) {
  OptimizerConfig c;
  c.starts = 12;
  c.seed = 77;
  c.threads = 1;
  const OptimizationResult a = minimize(rosenbrock(), c);
  c.threads = 4;
  const OptimizationResult b = minimize(rosenbrock(), c);
  EXPECT_EQ(a.best_value, b.best_value);
  EXPECT_TRUE((a.best_params.array() == b.best_params.array()).all());
  EXPECT_EQ(a.start_values, b.start_values);
  c.seed = 78;
  EXPECT_NE(minimize(rosenbrock(), c).start_values, a.start_values);
}

TEST(Minimize, RejectsBadConfig) {
  OptimizerConfig c;
  c.starts = 0;
  EXPECT_THROW(minimize(rosenbrock(), c), InvariantError);
  c.starts = 1;
  c.tol_f = 0.0;
  EXPECT_THROW(minimize(rosenbrock(), c), InvariantError);
}

TEST(Minimize, ExceptionsPropagateFromWorkers) {
  Objective f{1, [](const RealVector&) -> double { throw InternalError("boom"); }};
  OptimizerConfig c;
  c.starts = 4;
  c.threads = 2;
  EXPECT_THROW(minimize(f, c), InternalError);
}

TEST(GridOracle, FindsMinimumOfQuadratic) {
  Objective f{2, [](const RealVector& x) { return std::pow(x(0) - 0.3, 2) + std::pow(x(1) + 0.7, 2); }};
  GridSpec spec{{{-1.0, 1.0}, {-1.0, 1.0}}, {21, 21}, 10, 4};
  const OptimizationResult r = grid_oracle(f, spec);
  EXPECT_LT(r.best_value, 1e-12);
  EXPECT_NEAR(r.best_params(1), -0.7, 1e-6);
}

TEST(GridOracle, ValidatesSpec) {
  Objective f{2, [](const RealVector&) { return 0.0; }};
  EXPECT_THROW(grid_oracle(f, GridSpec{{{0.0, 1.0}}, {3}, 0, 1}), InvariantError);
  EXPECT_THROW(grid_oracle(f, GridSpec{{{0.0, 1.0}, {0.0, 1.0}}, {1, 3}, 0, 1}), InvariantError);
  EXPECT_EQ(points_for_spacing({0.0, 1.0}, 0.25), 5);
}

TEST(Seesaw, TraceIsMonotoneAndReachesTopEigenvalueOnProducts) {
  Rng rng = make_rng(41);
  // O = A (x) B: the product-state maximum is lambda_max(A) lambda_max(B) when both are positive.
  const Matrix a = random_density_matrix(3, 3, rng).matrix(), b = random_density_matrix(2, 2, rng).matrix();
  const detail::ProductLinearProblem p{kron(a, b), 3, 2};
  OptimizerConfig c;
  c.starts = 5;
  const SeesawResult s = seesaw(p, c);
  for (size_t i = 1; i < s.trace.size(); ++i) EXPECT_GE(s.trace[i], s.trace[i - 1]);
  EXPECT_NEAR(s.summary.best_value, eigvalsh(a).maxCoeff() * eigvalsh(b).maxCoeff(), 1e-10);
  EXPECT_TRUE(s.summary.converged);
}

TEST(Seeds, SplitSeedStreamsDiffer) {
  EXPECT_NE(split_seed(1, 0), split_seed(1, 1));
  EXPECT_NE(split_seed(1, 0), split_seed(2, 0));
  EXPECT_EQ(split_seed(5, 9), split_seed(5, 9));
}
