#pragma once

// Induced geometry of a CMC leaf in the reduction. The leaf metric is
//   g = A(xi) dxi^2 + B(xi)^2 h
// with A = 1 - u'^2, B = u in wedges and A = u^2 - u'^2, B = u cosh(s) in
// collars (h the metric of the cross-section at the totally geodesic level).
// All quantities are reported in tau units unless stated otherwise.

#include <string>
#include <vector>

#include "cmclab/solver.hpp"

namespace cmclab {

struct LeafSample {
  ChartPoint point;  // segment, local xi, rho = u, x = 0
  int node = 0;
  SegmentKind kind = SegmentKind::wedge;
  // Block form of the induced metric: B^2 h on the cross-section, no mixed
  // term (the height does not depend on x), A on the chain direction.
  double cross_scale = 0.0;  // B^2
  double mixed = 0.0;
  double chain = 0.0;        // A
  double detg = 0.0;         // A B^{2(n-1)}, relative to det h
  // u^{2(n-1)} in wedges, u^{2n} cosh^{2(n-1)}(s) in collars.
  double detg_bound = 0.0;
  // Second fundamental form: K = k_chain A dxi^2 + k_cross B^2 h.
  double k_chain = 0.0;
  double k_cross = 0.0;
  double meanH = 0.0;
  double Ksq = 0.0;
  // Scalar curvature from the warped-product formula with the metric
  // functions differentiated on the solver grid (one-sided at piece ends).
  double R = 0.0;
};

// Metric part of the sample at a node; throws NotSpacelike if detg <= 0.
LeafSample induced_metric(const HeightField& field, int node);
// Metric, second fundamental form and scalar curvature at a node.
LeafSample second_fundamental_form(const HeightField& field, int node);
// Every node of the field.
std::vector<LeafSample> leaf_samples(const HeightField& field);

// Scalar curvature at a node with the metric-function derivatives taken from
// the height jet instead of the grid. Satisfies the Gauss equation with the
// jet's own mean curvature up to rounding.
double analytic_scalar_curvature(const HeightField& field, int node);

enum class RegionKind { wedge, off_wedges, all };

struct Region {
  RegionKind kind = RegionKind::all;
  int wedge = -1;  // segment index for RegionKind::wedge
  // Sub-interval of the wedge as fractions of its width; with `complement`
  // the region is the wedge minus this interval.
  double begin = 0.0;
  double end = 1.0;
  bool complement = false;

  static Region all_leaf() { return {}; }
  static Region off_wedges() { return {RegionKind::off_wedges, -1, 0.0, 1.0, false}; }
  static Region whole_wedge(int segment) { return {RegionKind::wedge, segment, 0.0, 1.0, false}; }
  // (eps, 1 - eps) of the wedge, and its complement.
  static Region wedge_interior(int segment, double eps) {
    return {RegionKind::wedge, segment, eps, 1.0 - eps, false};
  }
  static Region wedge_ends(int segment, double eps) {
    return {RegionKind::wedge, segment, eps, 1.0 - eps, true};
  }
  std::string describe() const;
};

// Integral of sqrt(det g) times the cross-section volume over the region
// (composite trapezoid on the solver grid).
double leaf_volume(const HeightField& field, const Region& region);

// Sampled reduced leaf metric shared by the distance, spectrum and energy
// computations.
struct LeafProfile {
  struct Node {
    int node = 0;
    int piece = 0;
    int segment = 0;
    bool wedge = true;
    long double pos = 0;  // global chain coordinate
    long double A = 0;
    long double sqrtA = 0;
    long double B = 0;
    long double cross_volume = 0;  // volume of the cross-section at the totally geodesic level
    long double Ksq = 0;
  };
  const HeightField* field = nullptr;
  int dimension = 2;
  std::vector<Node> nodes;
  // Node range of every piece: [first, first + count).
  std::vector<std::pair<int, int>> piece_nodes;

  explicit LeafProfile(const HeightField& f);
  // Trapezoid integral of g(node) d(chain) over nodes selected by the filter
  // (intervals between two selected nodes of one piece).
  template <typename Fn, typename Filter>
  long double integrate(Fn&& g, Filter&& keep) const {
    long double total = 0;
    for (const auto& [first, count] : piece_nodes)
      for (int i = first; i + 1 < first + count; ++i) {
        const Node& a = nodes[static_cast<std::size_t>(i)];
        const Node& b = nodes[static_cast<std::size_t>(i + 1)];
        if (!keep(a) || !keep(b)) continue;
        total += (b.pos - a.pos) * (g(a) + g(b)) / 2;
      }
    return total;
  }
};

// Same integral on a precomputed profile.
double leaf_volume(const LeafProfile& profile, const Region& region);

enum class DistanceMethod { clairaut, mesh_dijkstra };
std::string to_string(DistanceMethod method);

struct LeafPoint {
  int segment = 0;
  double xi = 0.0;  // local chain coordinate (tau units)
  double x = 0.0;   // arc length along a cross-section geodesic at s = 0
};

struct MeshOptions {
  int max_levels = 400;  // chain levels kept from the solver grid
  int x_cells = 48;
};

struct GeodesicQuery {
  LeafPoint from;
  LeafPoint to;
  DistanceMethod method = DistanceMethod::clairaut;
  MeshOptions mesh{};
};

// Geodesic distance on the leaf between two points. The Clairaut method uses
// the first integral c = B^2 dx/dsigma of the reduced metric and solves for c;
// it needs a chain-monotone geodesic (ChartError otherwise). The mesh method
// runs Dijkstra on a 32-direction stencil over a (chain, x) mesh.
double leaf_distance(const HeightField& field, const GeodesicQuery& query);

struct DistanceCheck {
  double clairaut = 0.0;
  double mesh = 0.0;
  double resolution = 0.0;  // largest metric length of one mesh step
  double tolerance = 0.0;   // max(1e-4, 10 * resolution)
  bool agree = false;
};

DistanceCheck compare_distance_methods(const HeightField& field, const LeafPoint& from,
                                       const LeafPoint& to, const MeshOptions& mesh = {});
// Clairaut distance after the mesh cross-check; throws MethodDisagreement.
double checked_leaf_distance(const HeightField& field, const LeafPoint& from, const LeafPoint& to,
                             const MeshOptions& mesh = {});

// Distance across a wedge at fixed x, end to end (eps = 0) or between the
// points at fraction eps from either end.
double wedge_crossing_distance(const HeightField& field, int wedge, double eps = 0.0);

// Length of the closed Clairaut geodesic through one chain period of a
// periodic leaf whose cross-section coordinate advances by dx (n = 2 x-period
// L(Sigma) times the winding). For dx = 0 it is the integral of sqrt(A).
double periodic_geodesic_length(const HeightField& field, double dx);

struct PeriodicGeodesic {
  double length = 0.0;
  double momentum = 0.0;        // Clairaut constant c = B^2 dx/dsigma
  double wedge_part = 0.0;      // length spent inside wedge segments
  double off_wedge_part = 0.0;
};
PeriodicGeodesic periodic_geodesic(const HeightField& field, double dx);

enum class FlatnessKind { gauss_curvature, cotton_norm, weyl_norm };
std::string to_string(FlatnessKind kind);

struct FlatnessDiagnostic {
  FlatnessKind kind = FlatnessKind::gauss_curvature;
  int dimension = 2;
  int resolution = 33;
  double step = 0.0;
  double sup_norm = 0.0;         // sup over the evaluated patch points
  double curvature_scale = 0.0;  // sup |Ric| (|Ric|^{3/2} for the Cotton tensor)
  double relative = 0.0;         // sup_norm / curvature_scale (sup_norm when the scale is zero)
  int points = 0;
};

// Curvature diagnostics of the wedge slice h + dr^2, h the hyperbolic metric
// of dimension n - 1 realized on a Poincare ball of radius 0.5 with
// resolution points per axis. The metric is sampled analytically and
// differentiated by nested fourth-order central differences. Throws
// PatchTooCoarse when the nested stencils leave no interior point.
FlatnessDiagnostic conformal_flatness_diagnostic(int n, int resolution = 33);

}  // namespace cmclab
