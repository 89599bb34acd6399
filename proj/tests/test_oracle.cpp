#include <gtest/gtest.h>

#include <cmath>

#include "cmclab/errors.hpp"
#include "cmclab/kasner.hpp"
#include "cmclab/oracle.hpp"

using namespace cmclab;

TEST(Oracle, KasnerSliceSecondOrder) {
  for (int n : {2, 3, 4}) {
    const HeightField f = solve_cmc_leaf(kasner_model(n, 1.0, 2.0), -(n - 1.0), {});
    const OracleOrderStudy s = oracle_order_study(f, interior_nodes(f, 5), 0.2, 4);
    EXPECT_NEAR(s.measured_order, 2.0, 0.2) << "n = " << n;
    EXPECT_GT(s.sup_relative_residual.front(), 0.0);
  }
}

TEST(Oracle, ConeLeafSecondOrder) {
  for (int n : {2, 3}) {
    const double c = 0.7;
    const HeightField f = solve_cmc_leaf(cone_model(n, 2.0, 1.0), -n / c, {});
    const OracleOrderStudy s = oracle_order_study(f, interior_nodes(f, 7), 0.2, 4);
    EXPECT_NEAR(s.measured_order, 2.0, 0.2);
    for (const OracleSample& o : fd_mean_curvature_oracle(f, interior_nodes(f, 7), {1e-2, 2}))
      EXPECT_NEAR(o.mean_curvature, -n / c, 1e-9);
  }
}

TEST(Oracle, SolvedWedgeFieldAgrees) {
  const HeightField f = solve_cmc_leaf(wedge_model(2, 1.0, 2.0, 3.0), -100.0, {});
  const std::vector<int> nodes = interior_nodes(f, 3);
  const OracleOrderStudy s = oracle_order_study(f, nodes, 0.1, 4);
  EXPECT_NEAR(s.measured_order, 2.0, 0.2);
  double sup = 0.0;
  for (const OracleSample& o : fd_mean_curvature_oracle(f, nodes, {1e-2, 2}))
    sup = std::max(sup, o.relative_residual);
  EXPECT_LT(sup, 1e-9);
}

TEST(Oracle, SolvedFieldHigherDimension) {
  const HeightField f = solve_cmc_leaf(wedge_model(3, 1.0, 2.0, 2.0), -6.0, {});
  double sup = 0.0;
  for (const OracleSample& o : fd_mean_curvature_oracle(f, interior_nodes(f, 2), {1e-2, 2}))
    sup = std::max(sup, o.relative_residual);
  EXPECT_LT(sup, 1e-9);
}

TEST(Oracle, StepTooLarge) {
  const HeightField f = solve_cmc_leaf(wedge_model(2, 1.0, 2.0, 3.0), -10.0, {});
  EXPECT_THROW(fd_mean_curvature_oracle(f, interior_nodes(f, 1), {5.0, 0}), StepTooLarge);
}

TEST(Kasner, ExactKasnerHasZeroNorms) {
  std::vector<HeightField> ladder;
  const ModelSpec m = kasner_model(2, 1.0, 2.0);
  for (double lam : {1.0, 2.0, 4.0, 8.0}) ladder.push_back(solve_cmc_leaf(m, -lam, {}));
  const KasnerLimitReport r = kasner_limit_check(ladder);
  for (std::size_t i = 0; i < r.lambdas.size(); ++i) {
    EXPECT_LT(r.sup_deviation[i], 1e-15L);
    EXPECT_LT(r.sup_slope[i], 1e-15L);
  }
}

TEST(Kasner, WedgeLadderDecreases) {
  std::vector<HeightField> ladder;
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  for (double lam : {10.0, 20.0, 40.0, 80.0}) ladder.push_back(solve_cmc_leaf(m, -lam, {}));
  const KasnerLimitReport r = kasner_limit_check(ladder);
  EXPECT_TRUE(r.deviation_decreasing);
  EXPECT_TRUE(r.slope_decreasing);
  EXPECT_TRUE(r.curvature_decreasing);
  EXPECT_NEAR(r.exponential_rate / r.predicted_exponential_rate, 1.0, 0.1);
  for (const DerivativeBound& b : r.derivative_bounds) EXPECT_LE(b.constant, r.derivative_bound_theory);
}

TEST(Kasner, InsufficientLadder) {
  std::vector<HeightField> ladder;
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  for (double lam : {10.0, 20.0, 40.0}) ladder.push_back(solve_cmc_leaf(m, -lam, {}));
  EXPECT_THROW(kasner_limit_check(ladder), InsufficientLadder);
}
