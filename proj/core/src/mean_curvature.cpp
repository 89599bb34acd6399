#include "cmclab/mean_curvature.hpp"

#include "cmclab/errors.hpp"

namespace cmclab {

double spacelike_margin(SegmentKind kind, const Jet& jet) {
  const double slope = kind == SegmentKind::wedge ? jet.du : jet.du / jet.u;
  return 1.0 - slope * slope;
}

double reduced_mean_curvature(const ModelSpec& model, int segment, double xi, const Jet& jet) {
  if (segment < 0 || segment >= model.segment_count()) throw ChartError("segment out of range");
  const Segment& seg = model.segment(segment);
  if (xi < 0.0 || xi > seg.width) throw ChartError("chain coordinate outside the segment");
  if (!(jet.u > 0.0) || !(spacelike_margin(seg.kind, jet) > 0.0))
    throw NotSpacelike("graph is not spacelike at the given jet");
  double slope = 0.0;
  if (!seg.is_wedge()) {
    const double s = seg.collar_parameter(xi);
    double ds = 1.0;
    if (seg.profile == CollarProfile::falling) ds = -1.0;
    if (seg.profile == CollarProfile::tent && xi > 0.5 * seg.width) ds = -1.0;
    slope = ds * std::tanh(s);
  }
  return mean_curvature(model.dimension(), seg.kind, jet.u, jet.du, jet.d2u, slope);
}

}  // namespace cmclab
