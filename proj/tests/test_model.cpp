#include <gtest/gtest.h>

#include <cmath>

#include "cmclab/errors.hpp"
#include "cmclab/model.hpp"

using namespace cmclab;

TEST(Model, MinimalWedgeModelIsValid) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  EXPECT_EQ(m.segment_count(), 3);
  EXPECT_TRUE(m.has_wedge());
  EXPECT_TRUE(m.has_collar());
  EXPECT_EQ(m.wedge_indices(), std::vector<int>{1});
  EXPECT_DOUBLE_EQ(m.total_width(), 7.0);
}

TEST(Model, AdjacentWedgesRejected) {
  EXPECT_THROW(build_model(3, {Segment::wedge("a", 1, 1), Segment::wedge("b", 1, 1)},
                           Closure::truncated),
               AdjacencyError);
}

TEST(Model, DimensionBelowTwoRejected) {
  EXPECT_THROW(build_model(1, {Segment::wedge("a", 1, 1)}, Closure::truncated), BadDimension);
}

TEST(Model, JunctionVolumeUsesWarp) {
  const double warped = 2.0 * std::cosh(1.0);
  EXPECT_NEAR(warped, 3.0862, 1e-4);
  EXPECT_NO_THROW(build_model(2,
                              {Segment::collar("c", 1.0, 2.0, CollarProfile::rising),
                               Segment::wedge("w", 1.0, warped)},
                              Closure::truncated));
  EXPECT_THROW(build_model(2,
                           {Segment::collar("c", 1.0, 2.0, CollarProfile::rising),
                            Segment::wedge("w", 1.0, 2.0)},
                           Closure::truncated),
               JunctionMismatch);
}

TEST(Model, PeriodicJunctionsChecked) {
  EXPECT_THROW(build_model(2,
                           {Segment::collar("c", 1.0, 2.0, CollarProfile::rising),
                            Segment::wedge("w", 1.0, 2.0 * std::cosh(1.0))},
                           Closure::periodic),
               JunctionMismatch);
  EXPECT_NO_THROW(necklace_model(2, {{"S1", 0.5, 2.0}, {"S2", 1.0, 2.0}}, 2.0));
}

TEST(Model, LevelSetMeanCurvature) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  EXPECT_EQ(level_set_mean_curvature(m, {0, 1.0, 1.0, 0.0}), -2.0);
  EXPECT_EQ(level_set_mean_curvature(m, {1, 0.5, 1.0, 0.0}), -1.0);
  const ModelSpec m3 = wedge_model(3, 1.0, 2.0, 3.0);
  EXPECT_EQ(level_set_mean_curvature(m3, {1, 0.5, 2.0, 0.0}), -1.0);
  EXPECT_THROW(level_set_mean_curvature(m, {1, 1.5, 1.0, 0.0}), ChartError);
  EXPECT_THROW(level_set_mean_curvature(m, {1, 0.5, 0.0, 0.0}), ChartError);
}

TEST(Model, LevelSetHomogeneity) {
  const ModelSpec m = wedge_model(4, 1.0, 2.0, 3.0);
  for (int seg = 0; seg < 3; ++seg)
    for (double rho : {0.125, 0.3, 7.0, 1e5}) {
      const double at_one = level_set_mean_curvature(m, {seg, 0.5, 1.0, 0.0});
      EXPECT_EQ(level_set_mean_curvature(m, {seg, 0.5, rho, 0.0}), at_one / rho);
    }
}

TEST(Model, BarrierInterval) {
  BarrierInterval b = barrier_interval(2, -1.0);
  EXPECT_DOUBLE_EQ(b.lower, 1.0);
  EXPECT_DOUBLE_EQ(b.upper, 2.0);
  b = barrier_interval(3, -2.0);
  EXPECT_DOUBLE_EQ(b.lower, 1.0);
  EXPECT_DOUBLE_EQ(b.upper, 1.5);
  b = barrier_interval(2, -10.0);
  EXPECT_DOUBLE_EQ(b.lower, 0.1);
  EXPECT_DOUBLE_EQ(b.upper, 0.2);
  EXPECT_THROW(barrier_interval(2, 0.0), NonNegativeTau);
}

TEST(Model, BarrierScalesInverselyWithLambda) {
  for (int n : {2, 3, 5})
    for (double tau : {-0.5, -3.0, -1e4}) {
      const double lambda = rescaling_factor(n, tau);
      const BarrierInterval b = barrier_interval(n, tau);
      EXPECT_NEAR(b.lower * lambda, 1.0, 1e-15);
      EXPECT_NEAR(b.upper * lambda, n / (n - 1.0), 1e-15);
    }
}

TEST(Model, MinkowskiEmbedding) {
  const ModelSpec m = wedge_model(2, 10.0, 2.0, 3.0);
  MinkowskiPoint p = minkowski_embed(m, {1, 0.0, 1.0, 0.0});
  EXPECT_EQ(p.t, 1.0);
  EXPECT_EQ(p.y[0], 0.0);
  EXPECT_EQ(p.r, 0.0);
  p = minkowski_embed(m, {1, 5.0, 2.0, 0.0});
  EXPECT_EQ(p.t, 2.0);
  EXPECT_EQ(p.r, 5.0);
  p = minkowski_embed(m, {1, 0.0, 1.0, std::asinh(1.0)});
  EXPECT_NEAR(p.t, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p.y[0], 1.0, 1e-15);
  EXPECT_NEAR(p.t * p.t - p.y[0] * p.y[0], 1.0, 1e-14);
}

TEST(Model, CosmologicalTimeRoundTrip) {
  const ModelSpec m = wedge_model(3, 1.0, 2.0, 3.0);
  for (int seg = 0; seg < 3; ++seg)
    for (double rho : {0.01, 1.0, 42.0})
      for (double x : {-1.0, 0.0, 0.7}) {
        const ChartPoint cp{seg, 0.4, rho, x};
        const double back = cosmological_time(m, seg, minkowski_embed(m, cp));
        EXPECT_NEAR(back / rho, 1.0, 1e-12);
      }
}

TEST(Model, RescaledStretchesWedgesOnly) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  const ModelSpec r = m.rescaled(10.0);
  EXPECT_DOUBLE_EQ(r.segment(1).width, 10.0);
  EXPECT_DOUBLE_EQ(r.segment(0).width, 3.0);
}

TEST(Model, BaseVolumeClosedForms) {
  const ModelSpec c2 = cone_model(2, 1.0, 1.0);
  EXPECT_NEAR(c2.base_volume(), std::sinh(1.0), 1e-15);
  const ModelSpec c3 = cone_model(3, 1.0, 1.0);
  EXPECT_NEAR(c3.base_volume(), 0.5 * (1.0 + std::sinh(1.0) * std::cosh(1.0)), 1e-15);
  const ModelSpec c4 = cone_model(4, 1.0, 1.0);
  // int cosh^3 = sinh + sinh^3 / 3
  EXPECT_NEAR(c4.base_volume(), std::sinh(1.0) + std::pow(std::sinh(1.0), 3) / 3.0, 1e-12);
}

TEST(Model, CaveatsAlwaysPresent) {
  EXPECT_FALSE(wedge_model(2, 1.0, 2.0, 3.0).caveats().empty());
  EXPECT_FALSE(kasner_model(2, 1.0, 2.0).caveats().empty());
}
