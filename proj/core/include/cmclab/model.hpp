#pragma once

// Reduced flat spacetime models: Lorentz cones over hyperbolic collars glued to
// flat wedges, arranged along a one-dimensional chain.
//
// Sign convention (used throughout the library): the second fundamental form
// of a spacelike hypersurface is K = -1/2 d_rho g with the future-pointing unit
// normal, so expanding leaves have negative mean curvature tau = tr K.
//
// Collar segments use the geodesic distance s from the totally geodesic
// cross-section, with spatial metric rho^2 (ds^2 + cosh^2(s) h). Wedge segments
// carry rho^2 h + dr^2 with r the chain coordinate.

#include <optional>
#include <string>
#include <vector>

namespace cmclab {

enum class SegmentKind { collar, wedge };

// How the collar parameter s runs along a collar segment of width w, with xi
// the local chain coordinate in [0, w].
enum class CollarProfile {
  rising,   // s = xi
  falling,  // s = w - xi
  tent,     // s = min(xi, w - xi); kink at the midpoint
};

enum class Closure { truncated, periodic };
enum class OuterBoundary { neumann, dirichlet_cone };

std::string to_string(SegmentKind kind);
std::string to_string(CollarProfile profile);
std::string to_string(Closure closure);
std::string to_string(OuterBoundary boundary);

struct Segment {
  SegmentKind kind = SegmentKind::wedge;
  double width = 1.0;
  // Vol(Sigma) for a wedge; for a collar the cross-section volume at s = 0.
  double cross_section_volume = 1.0;
  std::string label;
  CollarProfile profile = CollarProfile::rising;

  static Segment wedge(std::string label, double width, double volume);
  static Segment collar(std::string label, double width, double volume, CollarProfile profile);

  bool is_wedge() const noexcept { return kind == SegmentKind::wedge; }

  // Collar parameter s at local chain coordinate xi (0 for wedges).
  double collar_parameter(double xi) const;
  // Volume of the cross-section at xi for a cone of spatial dimension n.
  double cross_section_volume_at(double xi, int n) const;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// A smooth sub-interval of a segment. Tent collars split into two pieces; every
// other segment is a single piece. The collar parameter is affine on a piece.
struct Piece {
  int segment = 0;
  SegmentKind kind = SegmentKind::wedge;
  double xi_begin = 0.0;  // offset inside the owning segment
  double width = 0.0;
  double s_begin = 0.0;
  double s_slope = 0.0;   // +1, -1 for collars; 0 for wedges

  bool is_wedge() const noexcept { return kind == SegmentKind::wedge; }
  double collar_parameter(double local_xi) const { return s_begin + s_slope * local_xi; }
};

class ModelSpec {
 public:
  int dimension() const noexcept { return n_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const Segment& segment(int k) const { return segments_.at(static_cast<std::size_t>(k)); }
  int segment_count() const noexcept { return static_cast<int>(segments_.size()); }
  Closure closure() const noexcept { return closure_; }
  OuterBoundary outer_boundary() const noexcept { return outer_boundary_; }

  bool has_wedge() const noexcept;
  bool has_collar() const noexcept;
  std::vector<int> wedge_indices() const;
  std::optional<int> find_label(const std::string& label) const;

  // Chain coordinate of the start of segment k.
  double segment_offset(int k) const;
  double total_width() const;

  std::vector<Piece> pieces() const;

  // Hyperbolic volume of the collar part of the base manifold (the wedges have
  // no base volume).
  double base_volume() const;

  // The model after scaling the spacetime metric by lambda^2: wedges stretch to
  // lambda * width, collars are unchanged.
  ModelSpec rescaled(double lambda) const;

  // Disclaimers carried into every report.
  std::vector<std::string> caveats() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  friend ModelSpec build_model(int, std::vector<Segment>, Closure, OuterBoundary);
  int n_ = 2;
  std::vector<Segment> segments_;
  Closure closure_ = Closure::truncated;
  OuterBoundary outer_boundary_ = OuterBoundary::neumann;
};

// Validates and assembles a model. Throws BadDimension, AdjacencyError or
// JunctionMismatch.
ModelSpec build_model(int n, std::vector<Segment> segments, Closure closure,
                      OuterBoundary boundary = OuterBoundary::neumann);

// Convenience builders for the standard test geometries.
ModelSpec wedge_model(int n, double ell, double volume, double collar_extent,
                      OuterBoundary boundary = OuterBoundary::neumann);
ModelSpec cone_model(int n, double extent, double volume);
ModelSpec kasner_model(int n, double ell, double volume);
struct WedgeSpec {
  std::string label;
  double ell;
  double volume;
};
// Periodic chain: tent collar, wedge, tent collar, wedge, ...
ModelSpec necklace_model(int n, const std::vector<WedgeSpec>& wedges, double collar_width);

struct ChartPoint {
  int segment = 0;
  double xi = 0.0;
  double rho = 1.0;
  double x = 0.0;  // arc length along a cross-section geodesic
};

struct MinkowskiPoint {
  double t = 0.0;
  std::vector<double> y;  // n - 1 components
  double r = 0.0;         // wedge coordinate, or the collar's normal coordinate
};

// Exact mean curvature of the cosmological-time level set through the point:
// -n/rho off the wedges, -(n-1)/rho inside them.
double level_set_mean_curvature(const ModelSpec& model, const ChartPoint& point);

struct BarrierInterval {
  double lower;
  double upper;
};
// Heights between which every leaf of mean curvature tau lies.
BarrierInterval barrier_interval(int n, double tau);
double rescaling_factor(int n, double tau);

MinkowskiPoint minkowski_embed(const ModelSpec& model, const ChartPoint& point);
// Inverse of the time coordinate: sqrt(t^2 - |y|^2), minus r^2 in collars.
double cosmological_time(const ModelSpec& model, int segment, const MinkowskiPoint& p);

}  // namespace cmclab
