#include <gtest/gtest.h>

#include <cmath>

#include "cmclab/leaf_geometry.hpp"

using namespace cmclab;

namespace {

double gauss_residual(const LeafSample& s, double tau) { return s.Ksq - s.R - tau * tau; }

double sup_gauss_residual(const HeightField& f) {
  double sup = 0.0;
  for (const LeafSample& s : leaf_samples(f)) sup = std::max(sup, std::abs(gauss_residual(s, f.tau)));
  return sup;
}

}  // namespace

TEST(LeafGeometry, KasnerSliceClosedForms) {
  for (int n : {2, 3, 4}) {
    const ModelSpec m = kasner_model(n, 1.5, 2.0);
    const HeightField f = solve_cmc_leaf(m, -(n - 1), {});
    for (const LeafSample& s : leaf_samples(f)) {
      EXPECT_NEAR(s.chain, 1.0, 1e-14);
      EXPECT_NEAR(s.cross_scale, 1.0, 1e-14);
      EXPECT_NEAR(s.Ksq, n - 1, 1e-12);
      EXPECT_NEAR(s.R, -(n - 1) * (n - 2), 1e-12);
      EXPECT_NEAR(gauss_residual(s, f.tau), 0.0, 1e-12);
    }
    EXPECT_NEAR(leaf_volume(f, Region::all_leaf()), 1.5 * 2.0, 1e-12);
    EXPECT_NEAR(wedge_crossing_distance(f, 0), 1.5, 1e-12);
  }
}

TEST(LeafGeometry, ConeLeafClosedForms) {
  const ModelSpec m = cone_model(2, 1.5, 2.0);
  const HeightField f = solve_cmc_leaf(m, -2.0, {});
  for (const LeafSample& s : leaf_samples(f)) {
    EXPECT_NEAR(s.Ksq, 2.0, 1e-10);
    EXPECT_NEAR(s.R, -2.0, 1e-8);
    EXPECT_NEAR(s.meanH, -2.0, 1e-10);
    EXPECT_NEAR(gauss_residual(s, f.tau), 0.0, 1e-8);
  }
  EXPECT_NEAR(leaf_volume(f, Region::all_leaf()), m.base_volume(), 1e-3 * m.base_volume());
}

TEST(LeafGeometry, ConeVolumeScalesLikeLevelSet) {
  const ModelSpec m = cone_model(3, 1.0, 1.0);
  const double tau = -6.0;
  const HeightField f = solve_cmc_leaf(m, tau, {});
  const double rho = 3.0 / 6.0;
  EXPECT_NEAR(leaf_volume(f, Region::all_leaf()) / (std::pow(rho, 3) * m.base_volume()), 1.0, 1e-3);
}

TEST(LeafGeometry, TraceAndDeterminantBounds) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  SolverConfig cfg;
  const HeightField f = solve_cmc_leaf(m, -50.0, cfg);
  for (const LeafSample& s : leaf_samples(f)) {
    EXPECT_NEAR(s.meanH / f.tau, 1.0, 10 * cfg.tolerance);
    EXPECT_LE(s.detg, s.detg_bound * (1 + 1e-14));
    EXPECT_GE(s.Ksq, f.tau * f.tau / 2 * (1 - 1e-12));
  }
}

TEST(LeafGeometry, JetScalarCurvatureSatisfiesGauss) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  const HeightField f = solve_cmc_leaf(m, -20.0, {});
  const std::vector<LeafSample> samples = leaf_samples(f);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double R = analytic_scalar_curvature(f, static_cast<int>(i));
    EXPECT_NEAR((samples[i].Ksq - R - f.tau * f.tau) / (f.tau * f.tau), 0.0, 1e-9);
  }
}

TEST(LeafGeometry, GaussResidualSecondOrder) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  std::vector<double> res;
  for (double cells : {10.0, 20.0, 40.0}) {
    SolverConfig cfg;
    cfg.cells_per_unit = cells;
    res.push_back(sup_gauss_residual(solve_cmc_leaf(m, -3.0, cfg)));
  }
  EXPECT_NEAR(std::log2(res[0] / res[1]), 2.0, 0.3);
  EXPECT_NEAR(std::log2(res[1] / res[2]), 2.0, 0.3);
}

TEST(LeafGeometry, ScaledWedgeVolumeApproachesSlab) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  double prev = 1e9;
  for (double lambda : {10.0, 100.0, 1000.0}) {
    const HeightField f = solve_cmc_leaf(m, -lambda, {});
    const double v = lambda * leaf_volume(f, Region::whole_wedge(1));
    EXPECT_GT(v, 2.0);
    EXPECT_LT(v - 2.0, prev);
    prev = v - 2.0;
    const double inner = leaf_volume(f, Region::wedge_interior(1, 0.1));
    const double ends = leaf_volume(f, Region::wedge_ends(1, 0.1));
    EXPECT_NEAR(inner + ends, leaf_volume(f, Region::whole_wedge(1)), 1e-12);
  }
  EXPECT_LT(prev, 3e-3);
}

TEST(LeafGeometry, RegionDescriptions) {
  EXPECT_EQ(Region::all_leaf().describe(), "all");
  EXPECT_EQ(Region::off_wedges().describe(), "off_wedges");
  EXPECT_EQ(Region::whole_wedge(1).describe(), "wedge_1");
}

TEST(LeafGeometry, FlatDistanceIsEuclidean) {
  const ModelSpec m = kasner_model(2, 1.0, 2.0);
  const HeightField f = solve_cmc_leaf(m, -1.0, {});
  const double d = leaf_distance(f, {{0, 0.0, 0.0}, {0, 1.0, 0.75}});
  EXPECT_NEAR(d, 1.25, 1e-9);
  const DistanceCheck c = compare_distance_methods(f, {0, 0.0, 0.0}, {0, 1.0, 0.75});
  EXPECT_TRUE(c.agree);
  EXPECT_NEAR(c.mesh, 1.25, 1e-2);
}

TEST(LeafGeometry, MethodsAgreeOnSolvedWedge) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  for (double lambda : {10.0, 1000.0}) {
    const HeightField f = solve_cmc_leaf(m, -lambda, {});
    const DistanceCheck c = compare_distance_methods(f, {0, 0.5, 0.0}, {2, 1.0, 0.3});
    EXPECT_TRUE(c.agree) << c.clairaut << " " << c.mesh;
    EXPECT_NEAR(c.clairaut, c.mesh, 1e-2 * c.clairaut);
    EXPECT_NO_THROW(checked_leaf_distance(f, {1, 0.0, 0.0}, {1, 1.0, 0.0}));
  }
}

TEST(LeafGeometry, CollarTraversalBound) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  double prev = 1e9;
  for (double lambda : {10.0, 100.0, 1000.0}) {
    const HeightField f = solve_cmc_leaf(m, -lambda, {});
    const double d = leaf_distance(f, {{0, 0.0, 0.0}, {0, 3.0, 0.0}});
    EXPECT_LE(d, 2.0 / lambda * 3.0);
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(LeafGeometry, WedgeCrossingApproachesWidth) {
  const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  double prev = 1.0;
  for (double lambda : {10.0, 100.0, 1000.0}) {
    const HeightField f = solve_cmc_leaf(m, -lambda, {});
    const double deficit = 1.0 - wedge_crossing_distance(f, 1);
    EXPECT_GT(deficit, 0.0);
    EXPECT_LT(deficit, prev);
    prev = deficit;
  }
}

TEST(LeafGeometry, PeriodicGeodesic) {
  const ModelSpec m = kasner_model(2, 1.0, 2.0);
  const HeightField f = solve_cmc_leaf(m, -1.0, {});
  EXPECT_NEAR(periodic_geodesic_length(f, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(periodic_geodesic_length(f, 2.0), std::sqrt(5.0), 1e-9);
}

TEST(LeafGeometry, RejectsBadPoints) {
  const ModelSpec m = kasner_model(2, 1.0, 2.0);
  const HeightField f = solve_cmc_leaf(m, -1.0, {});
  EXPECT_THROW(leaf_distance(f, {{3, 0.0, 0.0}, {0, 1.0, 0.0}}), ChartError);
  EXPECT_THROW(leaf_distance(f, {{0, 2.0, 0.0}, {0, 1.0, 0.0}}), ChartError);
  EXPECT_THROW(wedge_crossing_distance(solve_cmc_leaf(wedge_model(2, 1.0, 2.0, 3.0), -5.0, {}), 0),
               ValidationError);
}

TEST(LeafGeometry, FlatnessDiagnostics) {
  EXPECT_EQ(conformal_flatness_diagnostic(2, 33).sup_norm, 0.0);
  double prev = 1e9;
  for (int res : {17, 33, 65}) {
    const FlatnessDiagnostic d = conformal_flatness_diagnostic(3, res);
    EXPECT_EQ(d.kind, FlatnessKind::cotton_norm);
    EXPECT_NEAR(d.curvature_scale, std::pow(2.0, 0.75), 2e-3);
    EXPECT_LT(d.relative, prev / 10);
    prev = d.relative;
  }
  // H^3 x R is conformally flat as well; the Weyl norm is discretization error.
  const FlatnessDiagnostic a = conformal_flatness_diagnostic(4, 17);
  const FlatnessDiagnostic b = conformal_flatness_diagnostic(4, 33);
  EXPECT_EQ(a.kind, FlatnessKind::weyl_norm);
  EXPECT_LT(b.relative, a.relative / 10);
  EXPECT_THROW(conformal_flatness_diagnostic(3, 3), PatchTooCoarse);
  EXPECT_THROW(conformal_flatness_diagnostic(4, 9), PatchTooCoarse);
}
