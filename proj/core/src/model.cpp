#include "cmclab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmclab/errors.hpp"

namespace cmclab {

namespace {

constexpr double kJunctionTolerance = 1e-12;

bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::string to_string(SegmentKind kind) { return kind == SegmentKind::wedge ? "wedge" : "collar"; }

std::string to_string(CollarProfile profile) {
  switch (profile) {
    case CollarProfile::rising: return "rising";
    case CollarProfile::falling: return "falling";
    case CollarProfile::tent: return "tent";
  }
  return "rising";
}

std::string to_string(Closure closure) {
  return closure == Closure::periodic ? "periodic" : "truncated";
}

std::string to_string(OuterBoundary boundary) {
  return boundary == OuterBoundary::dirichlet_cone ? "dirichlet-cone" : "neumann";
}

Segment Segment::wedge(std::string label, double width, double volume) {
  return Segment{SegmentKind::wedge, width, volume, std::move(label), CollarProfile::rising};
}

Segment Segment::collar(std::string label, double width, double volume, CollarProfile profile) {
  return Segment{SegmentKind::collar, width, volume, std::move(label), profile};
}

double Segment::collar_parameter(double xi) const {
  if (is_wedge()) return 0.0;
  switch (profile) {
    case CollarProfile::rising: return xi;
    case CollarProfile::falling: return width - xi;
    case CollarProfile::tent: return std::min(xi, width - xi);
  }
  return xi;
}

double Segment::cross_section_volume_at(double xi, int n) const {
  if (is_wedge()) return cross_section_volume;
  return cross_section_volume * std::pow(std::cosh(collar_parameter(xi)), n - 1);
}

bool ModelSpec::has_wedge() const noexcept {
  return std::any_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.is_wedge(); });
}

bool ModelSpec::has_collar() const noexcept {
  return std::any_of(segments_.begin(), segments_.end(), [](const Segment& s) { return !s.is_wedge(); });
}

std::vector<int> ModelSpec::wedge_indices() const {
  std::vector<int> out;
  for (int k = 0; k < segment_count(); ++k)
    if (segments_[static_cast<std::size_t>(k)].is_wedge()) out.push_back(k);
  return out;
}

std::optional<int> ModelSpec::find_label(const std::string& label) const {
  for (int k = 0; k < segment_count(); ++k)
    if (segments_[static_cast<std::size_t>(k)].label == label) return k;
  return std::nullopt;
}

double ModelSpec::segment_offset(int k) const {
  double offset = 0.0;
  for (int j = 0; j < k; ++j) offset += segments_.at(static_cast<std::size_t>(j)).width;
  return offset;
}

double ModelSpec::total_width() const { return segment_offset(segment_count()); }

std::vector<Piece> ModelSpec::pieces() const {
  std::vector<Piece> out;
  for (int k = 0; k < segment_count(); ++k) {
    const Segment& seg = segments_[static_cast<std::size_t>(k)];
    if (seg.is_wedge()) {
      out.push_back(Piece{k, SegmentKind::wedge, 0.0, seg.width, 0.0, 0.0});
      continue;
    }
    switch (seg.profile) {
      case CollarProfile::rising:
        out.push_back(Piece{k, SegmentKind::collar, 0.0, seg.width, 0.0, 1.0});
        break;
      case CollarProfile::falling:
        out.push_back(Piece{k, SegmentKind::collar, 0.0, seg.width, seg.width, -1.0});
        break;
      case CollarProfile::tent: {
        const double half = 0.5 * seg.width;
        out.push_back(Piece{k, SegmentKind::collar, 0.0, half, 0.0, 1.0});
        out.push_back(Piece{k, SegmentKind::collar, half, half, half, -1.0});
        break;
      }
    }
  }
  return out;
}

double ModelSpec::base_volume() const {
  double vol = 0.0;
  for (const Piece& p : pieces()) {
    if (p.is_wedge()) continue;
    const double v0 = segments_[static_cast<std::size_t>(p.segment)].cross_section_volume;
    const double a = p.collar_parameter(0.0);
    const double b = p.collar_parameter(p.width);
    // int cosh^{n-1}(s) ds over [min, max]; closed forms for n = 2, 3, general
    // dimensions by Simpson on a fine grid.
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    double integral = 0.0;
    if (n_ == 2) {
      integral = std::sinh(hi) - std::sinh(lo);
    } else if (n_ == 3) {
      auto prim = [](double s) { return 0.5 * (s + std::sinh(s) * std::cosh(s)); };
      integral = prim(hi) - prim(lo);
    } else {
      const int m = 2000;
      const double h = (hi - lo) / m;
      for (int i = 0; i <= m; ++i) {
        const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        integral += w * std::pow(std::cosh(lo + i * h), n_ - 1);
      }
      integral *= h / 3.0;
    }
    vol += v0 * integral;
  }
  return vol;
}

ModelSpec ModelSpec::rescaled(double lambda) const {
  std::vector<Segment> segs = segments_;
  for (Segment& s : segs)
    if (s.is_wedge()) s.width *= lambda;
  return build_model(n_, std::move(segs), closure_, outer_boundary_);
}

std::vector<std::string> ModelSpec::caveats() const {
  std::vector<std::string> out;
  out.push_back(
      "symmetric reduction: heights depend only on the chain coordinate; this is not a closed "
      "hyperbolic manifold");
  if (closure_ == Closure::truncated) {
    std::ostringstream os;
    os << "truncated chain: outer boundary condition '" << to_string(outer_boundary_)
       << "' replaces the far field; wedge-local limits are insensitive to it but absolute "
          "volumes and areas are not";
    out.push_back(os.str());
  } else {
    out.push_back(
        "periodic necklace: collar midpoints carry a kink in the warp (distributional "
        "curvature) which the reduced leaf metric inherits");
  }
  return out;
}

ModelSpec build_model(int n, std::vector<Segment> segments, Closure closure, OuterBoundary boundary) {
  if (n < 2) throw BadDimension("spatial dimension must be at least 2, got " + std::to_string(n));
  if (segments.empty()) throw Error("model needs at least one segment");
  for (const Segment& s : segments) {
    if (!(s.width > 0.0) || !std::isfinite(s.width))
      throw Error("segment '" + s.label + "' must have positive width");
    if (!(s.cross_section_volume > 0.0) || !std::isfinite(s.cross_section_volume))
      throw Error("segment '" + s.label + "' must have positive cross-section volume");
  }
  const std::size_t count = segments.size();
  const std::size_t junctions = closure == Closure::periodic ? (count > 1 ? count : 0) : count - 1;
  for (std::size_t j = 0; j < junctions; ++j) {
    const Segment& a = segments[j];
    const Segment& b = segments[(j + 1) % count];
    if (a.is_wedge() && b.is_wedge())
      throw AdjacencyError("wedges '" + a.label + "' and '" + b.label +
                           "' are adjacent without an intervening collar");
    const double va = a.cross_section_volume_at(a.width, n);
    const double vb = b.cross_section_volume_at(0.0, n);
    if (!close_relative(va, vb, kJunctionTolerance)) {
      std::ostringstream os;
      os.precision(17);
      os << "cross-section volume jumps from " << va << " ('" << a.label << "') to " << vb << " ('"
         << b.label << "')";
      throw JunctionMismatch(os.str());
    }
  }
  ModelSpec m;
  m.n_ = n;
  m.segments_ = std::move(segments);
  m.closure_ = closure;
  m.outer_boundary_ = boundary;
  return m;
}

ModelSpec wedge_model(int n, double ell, double volume, double collar_extent, OuterBoundary boundary) {
  return build_model(n,
                     {Segment::collar("C-", collar_extent, volume, CollarProfile::falling),
                      Segment::wedge("S1", ell, volume),
                      Segment::collar("C+", collar_extent, volume, CollarProfile::rising)},
                     Closure::truncated, boundary);
}

ModelSpec cone_model(int n, double extent, double volume) {
  return build_model(n, {Segment::collar("C", extent, volume, CollarProfile::rising)},
                     Closure::truncated, OuterBoundary::neumann);
}

ModelSpec kasner_model(int n, double ell, double volume) {
  return build_model(n, {Segment::wedge("S1", ell, volume)}, Closure::periodic);
}

ModelSpec necklace_model(int n, const std::vector<WedgeSpec>& wedges, double collar_width) {
  std::vector<Segment> segs;
  for (std::size_t k = 0; k < wedges.size(); ++k) {
    segs.push_back(Segment::collar("C" + std::to_string(k), collar_width, wedges[k].volume,
                                   CollarProfile::tent));
    segs.push_back(Segment::wedge(wedges[k].label, wedges[k].ell, wedges[k].volume));
  }
  return build_model(n, std::move(segs), Closure::periodic);
}

namespace {

const Segment& checked_segment(const ModelSpec& model, const ChartPoint& p) {
  if (p.segment < 0 || p.segment >= model.segment_count())
    throw ChartError("segment index " + std::to_string(p.segment) + " out of range");
  const Segment& seg = model.segment(p.segment);
  if (!(p.rho > 0.0)) throw ChartError("cosmological time must be positive");
  if (p.xi < 0.0 || p.xi > seg.width) throw ChartError("chain coordinate outside the segment");
  return seg;
}

}  // namespace

double level_set_mean_curvature(const ModelSpec& model, const ChartPoint& point) {
  const Segment& seg = checked_segment(model, point);
  const int n = model.dimension();
  return seg.is_wedge() ? -(n - 1) / point.rho : -n / point.rho;
}

double rescaling_factor(int n, double tau) {
  if (!(tau < 0.0)) throw NonNegativeTau("mean curvature must be negative");
  return -tau / (n - 1);
}

BarrierInterval barrier_interval(int n, double tau) {
  const double lambda = rescaling_factor(n, tau);
  return {1.0 / lambda, n / ((n - 1) * lambda)};
}

MinkowskiPoint minkowski_embed(const ModelSpec& model, const ChartPoint& point) {
  const Segment& seg = checked_segment(model, point);
  const int n = model.dimension();
  MinkowskiPoint out;
  out.y.assign(static_cast<std::size_t>(n - 1), 0.0);
  if (seg.is_wedge()) {
    out.t = point.rho * std::cosh(point.x);
    out.y[0] = point.rho * std::sinh(point.x);
    out.r = point.xi;
  } else {
    const double s = seg.collar_parameter(point.xi);
    out.t = point.rho * std::cosh(s) * std::cosh(point.x);
    out.y[0] = point.rho * std::cosh(s) * std::sinh(point.x);
    out.r = point.rho * std::sinh(s);
  }
  return out;
}

double cosmological_time(const ModelSpec& model, int segment, const MinkowskiPoint& p) {
  double q = p.t * p.t;
  for (double yi : p.y) q -= yi * yi;
  if (!model.segment(segment).is_wedge()) q -= p.r * p.r;
  if (!(q > 0.0)) throw ChartError("point lies outside the future cone");
  return std::sqrt(q);
}

}  // namespace cmclab
