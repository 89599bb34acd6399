#pragma once

// Mean curvature of a graph rho = u(xi) over the chain, in the reduced
// (cross-section symmetric) setting. The graph is spacelike when the induced
// chain coefficient 1 - (u'/a(u))^2 is positive, with a(u) = 1 in wedges and
// a(u) = u in collars.

#include <cmath>

#include "cmclab/dual.hpp"
#include "cmclab/model.hpp"

namespace cmclab {

struct Jet {
  double u = 0.0;
  double du = 0.0;
  double d2u = 0.0;
};

// Principal curvatures of the leaf: along the chain, and along the
// cross-section (multiplicity n - 1). Their weighted sum is the mean curvature.
template <typename T>
struct Curvatures {
  T chain;
  T cross;
};

// warp_slope is d/dxi log(cosh s(xi)) = s'(xi) tanh(s); zero in wedges.
template <typename T>
Curvatures<T> principal_curvatures(SegmentKind kind, const T& u, const T& du, const T& d2u,
                                   double warp_slope) {
  using std::sqrt;
  if (kind == SegmentKind::wedge) {
    const T w = sqrt(T(1.0) - du * du);
    return {-d2u / (w * w * w), T(-1.0) / (u * w)};
  }
  const T slope = du / u;
  const T w = sqrt(T(1.0) - slope * slope);
  const T w3 = w * w * w;
  return {-(u * u - T(2.0) * du * du + u * d2u) / (u * u * u * w3),
          -(T(1.0) / (u * w) + du * T(warp_slope) / (u * u * w))};
}

template <typename T>
T mean_curvature(int n, SegmentKind kind, const T& u, const T& du, const T& d2u, double warp_slope) {
  const Curvatures<T> k = principal_curvatures(kind, u, du, d2u, warp_slope);
  return k.chain + T(static_cast<double>(n - 1)) * k.cross;
}

// (H + (n-1)) / (n-1) for the rescaled problem, written in terms of the
// deviation v from the reference level (1 in wedges, n/(n-1) in collars) and
// split into its linearization at v = 0 plus a remainder that is quadratic in
// (v, v', v''). Every term of the remainder is a product of small quantities,
// so exponentially small deviations keep full relative precision.
template <typename T>
T curvature_excess_linear(int n, SegmentKind kind, const T& v, const T& du, const T& d2u,
                          double warp_slope) {
  const double m = n - 1;
  if (kind == SegmentKind::wedge) return v - d2u / T(m);
  const double c0 = n / m;
  return v / T(c0) - T(warp_slope / (c0 * c0)) * du - d2u / T(m * c0 * c0);
}

template <typename T>
T curvature_excess_remainder(int n, SegmentKind kind, const T& v, const T& du, const T& d2u,
                             double warp_slope) {
  using std::sqrt;
  const double m = n - 1;
  if (kind == SegmentKind::wedge) {
    const T u = T(1.0) + v;
    const T w = sqrt(T(1.0) - du * du);
    const T one_minus_w = du * du / (T(1.0) + w);
    const T w3 = w * w * w;
    const T one_minus_w3 = one_minus_w * (T(1.0) + w + w * w);
    const T first = -(v * v * w + du * du / (T(1.0) + w)) / (u * w);
    return first - d2u * one_minus_w3 / (T(m) * w3);
  }
  const double c0 = n / m;
  const T u = T(c0) + v;
  const T slope = du / u;
  const T w = sqrt(T(1.0) - slope * slope);
  const T w3 = w * w * w;
  const T one_minus_w = slope * slope / (T(1.0) + w);
  const T one_minus_w3 = one_minus_w * (T(1.0) + w + w * w);
  const T u2 = u * u;
  const T lift = v * (T(2.0 * c0) + v);  // u^2 - c0^2
  // 1/(u^2 W) - 1/c0^2 and 1/(u^2 W^3) - 1/c0^2 without cancellation.
  const T inv_w_gap = (u2 * one_minus_w - lift) / (u2 * w * T(c0 * c0));
  const T inv_w3_gap = (u2 * one_minus_w3 - lift) / (u2 * w3 * T(c0 * c0));
  const T first = (T(-static_cast<double>(n)) * one_minus_w) / (u * w) - T(m) * v * v / (u * T(c0));
  const T excess = first + du * du / (u * u2 * w3) - T(m * warp_slope) * du * inv_w_gap -
                   d2u * inv_w3_gap;
  return excess / T(m);
}

template <typename T>
T rescaled_curvature_excess(int n, SegmentKind kind, const T& v, const T& du, const T& d2u,
                            double warp_slope) {
  return curvature_excess_linear(n, kind, v, du, d2u, warp_slope) +
         curvature_excess_remainder(n, kind, v, du, d2u, warp_slope);
}

inline double warp_slope(const Piece& piece, double local_xi) {
  if (piece.is_wedge()) return 0.0;
  return piece.s_slope * std::tanh(piece.collar_parameter(local_xi));
}

// Mean curvature of the graph through the given jet at chain coordinate xi of
// a segment. Throws NotSpacelike when the jet violates the graph condition.
double reduced_mean_curvature(const ModelSpec& model, int segment, double xi, const Jet& jet);

// Spacelike margin 1 - (u'/a(u))^2 of a jet.
double spacelike_margin(SegmentKind kind, const Jet& jet);

}  // namespace cmclab
