#include "cmclab/leaf_geometry.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "cmclab/errors.hpp"
#include "cmclab/mean_curvature.hpp"

namespace cmclab {

namespace {

using Real = long double;

// Geometry of one node in rescaled units (lambda = 1).
struct Scaled {
  bool wedge = true;
  Real u = 1, du = 0, d2u = 0;
  Real s = 0, s_slope = 0;
  Real A = 1, B = 1;
  // Deviations from the reference leaf (u = 1 on wedges, n/(n-1) on collars).
  Real A_dev = 0, B_dev = 0;
  Real B_ref = 1, B_ref_d1 = 0, B_ref_d2 = 0;
};

Scaled scaled_node(const HeightField& field, int index) {
  const HeightNode& node = field.nodes.at(static_cast<std::size_t>(index));
  const Piece& piece = field.pieces[static_cast<std::size_t>(node.piece)].piece;
  const int n = field.dimension();
  Scaled g;
  g.wedge = piece.is_wedge();
  const Real e = node.excess;
  g.du = node.excess_slope;
  g.d2u = node.excess_curvature;
  if (g.wedge) {
    g.u = 1 + e;
    g.A_dev = -g.du * g.du;
    g.A = 1 + g.A_dev;
    g.B_dev = e;
    g.B = g.u;
    return g;
  }
  const Real c0 = Real(n) / Real(n - 1);
  g.u = c0 + e;
  g.s = piece.collar_parameter(node.xi - piece.xi_begin);
  g.s_slope = piece.s_slope;
  const Real ch = std::cosh(g.s);
  const Real sh = std::sinh(g.s);
  g.A_dev = e * (2 * c0 + e) - g.du * g.du;
  g.A = c0 * c0 + g.A_dev;
  g.B_ref = c0 * ch;
  g.B_ref_d1 = c0 * g.s_slope * sh;
  g.B_ref_d2 = c0 * ch;
  g.B_dev = e * ch;
  g.B = g.B_ref + g.B_dev;
  return g;
}

// Warped-product scalar curvature of A dxi^2 + B^2 h, h hyperbolic of
// dimension m = n - 1.
Real warped_scalar_curvature(int n, Real A, Real B, Real A1, Real B1, Real B2) {
  const Real m = n - 1;
  const Real Bs = B1 / std::sqrt(A);
  const Real Bss = B2 / A - B1 * A1 / (2 * A * A);
  return -m * (m - 1) / (B * B) - 2 * m * Bss / B - m * (m - 1) * (Bs / B) * (Bs / B);
}

// Second-order differences on one piece, one-sided at its ends.
Real diff1(const std::vector<Real>& f, int j, Real h) {
  const int N = static_cast<int>(f.size()) - 1;
  if (j == 0) return (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
  if (j == N) return (3 * f[N] - 4 * f[N - 1] + f[N - 2]) / (2 * h);
  return (f[j + 1] - f[j - 1]) / (2 * h);
}

Real diff2(const std::vector<Real>& f, int j, Real h) {
  const int N = static_cast<int>(f.size()) - 1;
  if (j == 0) return (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h);
  if (j == N) return (2 * f[N] - 5 * f[N - 1] + 4 * f[N - 2] - f[N - 3]) / (h * h);
  return (f[j + 1] - 2 * f[j] + f[j - 1]) / (h * h);
}

// Grid scalar curvature (rescaled units) for every node of a piece.
std::vector<Real> piece_scalar_curvature(const HeightField& scaled, const PieceRange& range) {
  const int count = range.cells + 1;
  std::vector<Scaled> g;
  std::vector<Real> A_dev(static_cast<std::size_t>(count)), B_dev(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    g.push_back(scaled_node(scaled, range.first + j));
    A_dev[static_cast<std::size_t>(j)] = g.back().A_dev;
    B_dev[static_cast<std::size_t>(j)] = g.back().B_dev;
  }
  const Real h = range.h;
  std::vector<Real> R(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const Scaled& p = g[static_cast<std::size_t>(j)];
    const Real A1 = diff1(A_dev, j, h);
    const Real B1 = p.B_ref_d1 + diff1(B_dev, j, h);
    const Real B2 = p.B_ref_d2 + diff2(B_dev, j, h);
    R[static_cast<std::size_t>(j)] = warped_scalar_curvature(scaled.dimension(), p.A, p.B, A1, B1, B2);
  }
  return R;
}

LeafSample metric_sample(const HeightField& field, int index) {
  const HeightNode& node = field.nodes.at(static_cast<std::size_t>(index));
  const Scaled g = scaled_node(field, index);
  const int n = field.dimension();
  const Real lambda = field.lambda;
  LeafSample s;
  s.node = index;
  s.kind = g.wedge ? SegmentKind::wedge : SegmentKind::collar;
  s.point = ChartPoint{node.segment, node.xi, static_cast<double>(g.u / lambda), 0.0};
  if (!(g.A > 0) || !(g.u > 0)) throw NotSpacelike("leaf metric degenerates at node " + std::to_string(index));
  // Collar chain coordinate is the dimensionless s, so A carries rho^2; the
  // wedge chain coordinate scales with the metric.
  const Real A = g.wedge ? g.A : g.A / (lambda * lambda);
  const Real B = g.B / lambda;
  const Real B2m = std::pow(B, 2 * (n - 1));
  s.cross_scale = static_cast<double>(B * B);
  s.chain = static_cast<double>(A);
  s.detg = static_cast<double>(A * B2m);
  const Real u = g.u / lambda;
  s.detg_bound = g.wedge ? static_cast<double>(std::pow(u, 2 * (n - 1)))
                         : static_cast<double>(std::pow(u, 2 * n) *
                                               std::pow(std::cosh(g.s), 2 * (n - 1)));
  return s;
}

void fill_curvatures(const HeightField& field, int index, LeafSample& s) {
  const Scaled g = scaled_node(field, index);
  const int n = field.dimension();
  const Real ws = g.wedge ? 0 : g.s_slope * std::tanh(g.s);
  const Curvatures<Real> k =
      principal_curvatures<Real>(g.wedge ? SegmentKind::wedge : SegmentKind::collar, g.u, g.du,
                                 g.d2u, static_cast<double>(ws));
  const Real lambda = field.lambda;
  s.k_chain = static_cast<double>(k.chain * lambda);
  s.k_cross = static_cast<double>(k.cross * lambda);
  s.meanH = static_cast<double>((k.chain + (n - 1) * k.cross) * lambda);
  s.Ksq = static_cast<double>((k.chain * k.chain + (n - 1) * k.cross * k.cross) * lambda * lambda);
}

}  // namespace

LeafSample induced_metric(const HeightField& field, int node) { return metric_sample(field, node); }

LeafSample second_fundamental_form(const HeightField& field, int node) {
  LeafSample s = metric_sample(field, node);
  fill_curvatures(field, node, s);
  const HeightNode& hn = field.nodes.at(static_cast<std::size_t>(node));
  const PieceRange& range = field.pieces[static_cast<std::size_t>(hn.piece)];
  const HeightField scaled = field.rescale();
  const std::vector<Real> R = piece_scalar_curvature(scaled, scaled.pieces[static_cast<std::size_t>(hn.piece)]);
  s.R = static_cast<double>(R[static_cast<std::size_t>(node - range.first)] * field.lambda * field.lambda);
  return s;
}

std::vector<LeafSample> leaf_samples(const HeightField& field) {
  std::vector<LeafSample> out;
  out.reserve(field.nodes.size());
  const HeightField scaled = field.rescale();
  const Real l2 = static_cast<Real>(field.lambda) * field.lambda;
  for (const PieceRange& range : scaled.pieces) {
    const std::vector<Real> R = piece_scalar_curvature(scaled, range);
    for (int j = 0; j <= range.cells; ++j) {
      LeafSample s = metric_sample(field, range.first + j);
      fill_curvatures(field, range.first + j, s);
      s.R = static_cast<double>(R[static_cast<std::size_t>(j)] * l2);
      out.push_back(s);
    }
  }
  return out;
}

double analytic_scalar_curvature(const HeightField& field, int node) {
  const Scaled g = scaled_node(field, node);
  Real A1, B1, B2;
  if (g.wedge) {
    A1 = -2 * g.du * g.d2u;
    B1 = g.du;
    B2 = g.d2u;
  } else {
    const Real ch = std::cosh(g.s);
    const Real sh = std::sinh(g.s);
    A1 = 2 * g.u * g.du - 2 * g.du * g.d2u;
    B1 = g.du * ch + g.u * g.s_slope * sh;
    B2 = g.d2u * ch + 2 * g.du * g.s_slope * sh + g.u * ch;
  }
  const Real R = warped_scalar_curvature(field.dimension(), g.A, g.B, A1, B1, B2);
  return static_cast<double>(R * field.lambda * field.lambda);
}

// ---------------------------------------------------------------------------
// Profiles, volumes

LeafProfile::LeafProfile(const HeightField& f) : field(&f), dimension(f.dimension()) {
  const int n = f.dimension();
  const Real lambda = f.lambda;
  const HeightField scaled = f.rescale();
  const std::vector<LeafSample> samples = leaf_samples(f);
  for (std::size_t p = 0; p < f.pieces.size(); ++p) {
    const PieceRange& range = f.pieces[p];
    piece_nodes.emplace_back(static_cast<int>(nodes.size()), range.cells + 1);
    for (int j = 0; j <= range.cells; ++j) {
      const int index = range.first + j;
      const HeightNode& hn = f.nodes[static_cast<std::size_t>(index)];
      const Scaled g = scaled_node(f, index);
      Node node;
      node.node = index;
      node.piece = static_cast<int>(p);
      node.segment = hn.segment;
      node.wedge = g.wedge;
      node.pos = static_cast<Real>(f.model->segment_offset(hn.segment)) + hn.xi;
      node.A = g.wedge ? g.A : g.A / (lambda * lambda);
      node.sqrtA = std::sqrt(node.A);
      node.B = g.B / lambda;
      node.cross_volume = f.model->segment(hn.segment).cross_section_volume;
      node.Ksq = samples[static_cast<std::size_t>(index)].Ksq;
      nodes.push_back(node);
    }
  }
  (void)n;
}

std::string Region::describe() const {
  std::ostringstream os;
  switch (kind) {
    case RegionKind::all: return "all";
    case RegionKind::off_wedges: return "off_wedges";
    case RegionKind::wedge:
      os << "wedge_" << wedge;
      if (begin != 0.0 || end != 1.0) os << (complement ? "_ends_" : "_interior_") << begin;
      return os.str();
  }
  return "all";
}

namespace {

// Chain intervals (global coordinate) covered by the region.
std::vector<std::pair<Real, Real>> region_intervals(const HeightField& field, const Region& region) {
  const ModelSpec& model = *field.model;
  std::vector<std::pair<Real, Real>> out;
  for (int k = 0; k < model.segment_count(); ++k) {
    const Segment& seg = model.segment(k);
    const Real off = model.segment_offset(k);
    const Real w = seg.width;
    switch (region.kind) {
      case RegionKind::all: out.emplace_back(off, off + w); break;
      case RegionKind::off_wedges:
        if (!seg.is_wedge()) out.emplace_back(off, off + w);
        break;
      case RegionKind::wedge:
        if (k != region.wedge) break;
        if (!seg.is_wedge()) throw ValidationError("region.wedge", "segment is not a wedge");
        if (region.complement) {
          out.emplace_back(off, off + region.begin * w);
          out.emplace_back(off + region.end * w, off + w);
        } else {
          out.emplace_back(off + region.begin * w, off + region.end * w);
        }
        break;
    }
  }
  if (region.kind == RegionKind::wedge && out.empty())
    throw ValidationError("region.wedge", "no wedge segment " + std::to_string(region.wedge));
  return out;
}

// Trapezoid integral of g over [lo, hi] within one piece, with linear
// interpolation of the integrand on partially covered cells.
template <typename Fn>
Real integrate_piece(const LeafProfile& prof, int piece, Real lo, Real hi, Fn&& g) {
  const auto [first, count] = prof.piece_nodes[static_cast<std::size_t>(piece)];
  Real total = 0;
  for (int i = first; i + 1 < first + count; ++i) {
    const LeafProfile::Node& a = prof.nodes[static_cast<std::size_t>(i)];
    const LeafProfile::Node& b = prof.nodes[static_cast<std::size_t>(i + 1)];
    const Real x0 = std::max(a.pos, lo);
    const Real x1 = std::min(b.pos, hi);
    if (!(x1 > x0)) continue;
    const Real ga = g(a);
    const Real gb = g(b);
    const Real len = b.pos - a.pos;
    const Real f0 = ga + (gb - ga) * (x0 - a.pos) / len;
    const Real f1 = ga + (gb - ga) * (x1 - a.pos) / len;
    total += (x1 - x0) * (f0 + f1) / 2;
  }
  return total;
}

template <typename Fn>
Real integrate_intervals(const LeafProfile& prof, const std::vector<std::pair<Real, Real>>& intervals,
                         Fn&& g) {
  Real total = 0;
  for (std::size_t p = 0; p < prof.piece_nodes.size(); ++p) {
    const auto [first, count] = prof.piece_nodes[p];
    const Real p0 = prof.nodes[static_cast<std::size_t>(first)].pos;
    const Real p1 = prof.nodes[static_cast<std::size_t>(first + count - 1)].pos;
    for (const auto& [lo, hi] : intervals) {
      const Real a = std::max(lo, p0);
      const Real b = std::min(hi, p1);
      if (b > a) total += integrate_piece(prof, static_cast<int>(p), a, b, g);
    }
  }
  return total;
}

}  // namespace

double leaf_volume(const LeafProfile& profile, const Region& region) {
  const int m = profile.dimension - 1;
  const auto density = [m](const LeafProfile::Node& a) {
    return a.cross_volume * a.sqrtA * std::pow(a.B, m);
  };
  return static_cast<double>(integrate_intervals(profile, region_intervals(*profile.field, region), density));
}

double leaf_volume(const HeightField& field, const Region& region) {
  return leaf_volume(LeafProfile(field), region);
}

// ---------------------------------------------------------------------------
// Distances

std::string to_string(DistanceMethod method) {
  return method == DistanceMethod::clairaut ? "clairaut" : "mesh-dijkstra";
}

namespace {

Real global_position(const HeightField& field, const LeafPoint& p) {
  const ModelSpec& model = *field.model;
  if (p.segment < 0 || p.segment >= model.segment_count())
    throw ChartError("segment index out of range");
  const double w = model.segment(p.segment).width;
  if (p.xi < -1e-12 * w || p.xi > w * (1 + 1e-12)) throw ChartError("chain coordinate outside the segment");
  return static_cast<Real>(model.segment_offset(p.segment)) + std::clamp(p.xi, 0.0, w);
}

// Clairaut quantities on [lo, hi]: dx(c) and length(c).
struct ClairautIntegrals {
  const LeafProfile& prof;
  std::vector<std::pair<Real, Real>> span;

  Real min_B() const {
    Real b = std::numeric_limits<Real>::infinity();
    for (const LeafProfile::Node& a : prof.nodes)
      for (const auto& [lo, hi] : span)
        if (a.pos >= lo && a.pos <= hi) b = std::min(b, a.B);
    return b;
  }
  Real dx(Real c) const {
    return integrate_intervals(prof, span, [c](const LeafProfile::Node& a) {
      return c * a.sqrtA / (a.B * std::sqrt(a.B * a.B - c * c));
    });
  }
  Real length(Real c) const {
    if (c == 0) return integrate_intervals(prof, span, [](const LeafProfile::Node& a) { return a.sqrtA; });
    return integrate_intervals(prof, span, [c](const LeafProfile::Node& a) {
      return a.B * a.sqrtA / std::sqrt(a.B * a.B - c * c);
    });
  }
};

Real clairaut_momentum(const ClairautIntegrals& ci, Real target_dx) {
  if (target_dx == 0) return 0;
  const Real cmax = ci.min_B() * (1 - Real(1e-12));
  const Real reach = ci.dx(cmax);
  if (!(reach >= target_dx))
    throw ChartError("endpoints are not joined by a chain-monotone geodesic");
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      [&](Real c) { return ci.dx(c) - target_dx; }, Real(0), cmax, -target_dx, reach - target_dx,
      boost::math::tools::eps_tolerance<Real>(60), iters);
  return (r.first + r.second) / 2;
}

Real clairaut_length(const ClairautIntegrals& ci, Real target_dx) {
  return ci.length(clairaut_momentum(ci, target_dx));
}

struct MeshResult {
  double length = 0.0;
  long double resolution = 0.0;
};

MeshResult mesh_dijkstra(const LeafProfile& prof, Real p0, Real p1, double x0, double x1,
                         const MeshOptions& opt) {
  // Chain levels: the endpoints plus subsampled grid nodes between them.
  std::vector<Real> pos;
  std::vector<Real> sqrtA;
  std::vector<Real> B;
  auto interp = [&](Real p, Real& sa, Real& b) {
    for (const auto& [first, count] : prof.piece_nodes) {
      const LeafProfile::Node& lo = prof.nodes[static_cast<std::size_t>(first)];
      const LeafProfile::Node& hi = prof.nodes[static_cast<std::size_t>(first + count - 1)];
      if (p < lo.pos || p > hi.pos) continue;
      for (int i = first; i + 1 < first + count; ++i) {
        const LeafProfile::Node& a = prof.nodes[static_cast<std::size_t>(i)];
        const LeafProfile::Node& c = prof.nodes[static_cast<std::size_t>(i + 1)];
        if (p >= a.pos && p <= c.pos) {
          const Real t = (p - a.pos) / (c.pos - a.pos);
          sa = a.sqrtA + t * (c.sqrtA - a.sqrtA);
          b = a.B + t * (c.B - a.B);
          return;
        }
      }
    }
    throw ChartError("mesh level outside the leaf");
  };
  // Levels are spread evenly in chain arc length; piece ends are always kept.
  std::vector<std::pair<Real, Real>> inner;  // (pos, sqrt A)
  std::vector<Real> seams;
  for (const auto& [first, count] : prof.piece_nodes) {
    for (int i = first; i < first + count; ++i) {
      const LeafProfile::Node& a = prof.nodes[static_cast<std::size_t>(i)];
      if (a.pos > p0 && a.pos < p1) inner.emplace_back(a.pos, a.sqrtA);
    }
    for (int i : {first, first + count - 1}) {
      const Real p = prof.nodes[static_cast<std::size_t>(i)].pos;
      if (p > p0 && p < p1) seams.push_back(p);
    }
  }
  std::sort(inner.begin(), inner.end());
  Real total_arc = 0;
  std::vector<Real> arc(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const Real prev_pos = i == 0 ? p0 : inner[i - 1].first;
    const Real prev_sa = i == 0 ? inner[i].second : inner[i - 1].second;
    total_arc += (inner[i].first - prev_pos) * (prev_sa + inner[i].second) / 2;
    arc[i] = total_arc;
  }
  const Real arc_step = total_arc / std::max(1, opt.max_levels);
  pos.push_back(p0);
  Real next = arc_step;
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (arc[i] >= next) {
      pos.push_back(inner[i].first);
      next = arc[i] + arc_step;
    }
  pos.insert(pos.end(), seams.begin(), seams.end());
  pos.push_back(p1);
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  for (Real p : pos) {
    Real sa = 0, b = 0;
    interp(p, sa, b);
    sqrtA.push_back(sa);
    B.push_back(b);
  }

  const double dx = std::abs(x1 - x0);
  const int half = std::max(2, opt.x_cells / 2);
  double hx;
  int k_cols;
  if (dx > 0) {
    const double span = std::max(dx, static_cast<double>(0.1L * (p1 - p0)));
    k_cols = std::max(1, static_cast<int>(std::lround(half * dx / span)));
    hx = dx / k_cols;
  } else {
    k_cols = 0;
    hx = std::max(static_cast<double>(0.1L * (p1 - p0)), 1e-6) / half;
  }
  const int pad = std::max(2, half / 2);
  const int cols = k_cols + 2 * pad + 1;
  const int levels = static_cast<int>(pos.size());
  const int source = 0 * cols + pad;
  const int target = (levels - 1) * cols + pad + k_cols;

  std::vector<std::pair<int, int>> dirs;
  for (int di = -3; di <= 3; ++di)
    for (int dj = -3; dj <= 3; ++dj)
      if ((di != 0 || dj != 0) && std::gcd(std::abs(di), std::abs(dj)) == 1) dirs.emplace_back(di, dj);

  // Chain arc length and integral of B over each level interval, taken on the
  // full solver grid so that boundary layers narrower than a level are resolved.
  std::vector<Real> seg_arc(pos.size() - 1), seg_B(pos.size() - 1);
  {
    std::vector<Real> fpos, cum_arc, cum_B, fsa, fB;
    for (const auto& [first, count] : prof.piece_nodes)
      for (int i = first; i < first + count; ++i) {
        const LeafProfile::Node& a = prof.nodes[static_cast<std::size_t>(i)];
        if (!fpos.empty()) {
          const Real dp = a.pos - fpos.back();
          cum_arc.push_back(cum_arc.back() + dp * (fsa.back() + a.sqrtA) / 2);
          cum_B.push_back(cum_B.back() + dp * (fB.back() + a.B) / 2);
        } else {
          cum_arc.push_back(0);
          cum_B.push_back(0);
        }
        fpos.push_back(a.pos);
        fsa.push_back(a.sqrtA);
        fB.push_back(a.B);
      }
    auto cumulative = [&](Real p, const std::vector<Real>& cum, const std::vector<Real>& f) {
      std::size_t k = static_cast<std::size_t>(std::upper_bound(fpos.begin(), fpos.end(), p) - fpos.begin());
      if (k == 0) return cum.front();
      if (k == fpos.size()) return cum.back();
      const std::size_t i = k - 1;
      const Real t = p - fpos[i];
      const Real slope = (f[k] - f[i]) / (fpos[k] - fpos[i]);
      return cum[i] + t * (f[i] + slope * t / 2);
    };
    for (std::size_t k = 0; k + 1 < pos.size(); ++k) {
      seg_arc[k] = cumulative(pos[k + 1], cum_arc, fsa) - cumulative(pos[k], cum_arc, fsa);
      seg_B[k] = cumulative(pos[k + 1], cum_B, fB) - cumulative(pos[k], cum_B, fB);
    }
  }

  auto edge_length = [&](int i, int di, int dj) -> Real {
    const Real dxe = static_cast<Real>(dj) * hx;
    if (di == 0) return B[static_cast<std::size_t>(i)] * std::abs(dxe);
    const int a = std::min(i, i + di);
    const int b = std::max(i, i + di);
    const Real total = pos[static_cast<std::size_t>(b)] - pos[static_cast<std::size_t>(a)];
    Real len = 0;
    for (int k = a; k < b; ++k) {
      // x advances in proportion to the chain coordinate along the edge.
      const Real cross = seg_B[static_cast<std::size_t>(k)] * dxe / total;
      len += std::hypot(seg_arc[static_cast<std::size_t>(k)], cross);
    }
    return len;
  };

  std::vector<Real> dist(static_cast<std::size_t>(levels * cols), std::numeric_limits<Real>::infinity());
  using Item = std::pair<Real, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  dist[static_cast<std::size_t>(source)] = 0;
  queue.emplace(0, source);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    if (v == target) break;
    const int i = v / cols;
    const int j = v % cols;
    for (const auto& [di, dj] : dirs) {
      const int ni = i + di;
      const int nj = j + dj;
      if (ni < 0 || ni >= levels || nj < 0 || nj >= cols) continue;
      const Real nd = d + edge_length(i, di, dj);
      const int w = ni * cols + nj;
      if (nd < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = nd;
        queue.emplace(nd, w);
      }
    }
  }
  MeshResult r;
  r.length = static_cast<double>(dist[static_cast<std::size_t>(target)]);
  // Largest metric length of a single mesh step.
  Real res = 0;
  for (int i = 0; i < levels; ++i) res = std::max(res, B[static_cast<std::size_t>(i)] * static_cast<Real>(hx));
  for (int i = 0; i + 1 < levels; ++i) res = std::max(res, edge_length(i, 1, 0));
  r.resolution = res;
  return r;
}

}  // namespace

double leaf_distance(const HeightField& field, const GeodesicQuery& query) {
  Real p0 = global_position(field, query.from);
  Real p1 = global_position(field, query.to);
  double x0 = query.from.x;
  double x1 = query.to.x;
  if (p1 < p0) {
    std::swap(p0, p1);
    std::swap(x0, x1);
  }
  const LeafProfile prof(field);
  if (query.method == DistanceMethod::mesh_dijkstra)
    return mesh_dijkstra(prof, p0, p1, x0, x1, query.mesh).length;
  if (p1 == p0) {
    Real sa = 0;
    Real b = 0;
    for (const LeafProfile::Node& a : prof.nodes)
      if (a.pos == p0) b = a.B, sa = a.sqrtA;
    (void)sa;
    if (b == 0) throw ChartError("equal chain positions must lie on grid nodes");
    return static_cast<double>(b * std::abs(x1 - x0));
  }
  const ClairautIntegrals ci{prof, {{p0, p1}}};
  return static_cast<double>(clairaut_length(ci, std::abs(static_cast<Real>(x1) - x0)));
}

DistanceCheck compare_distance_methods(const HeightField& field, const LeafPoint& from,
                                       const LeafPoint& to, const MeshOptions& mesh) {
  DistanceCheck c;
  c.clairaut = leaf_distance(field, {from, to, DistanceMethod::clairaut, mesh});
  Real p0 = global_position(field, from);
  Real p1 = global_position(field, to);
  double x0 = from.x;
  double x1 = to.x;
  if (p1 < p0) {
    std::swap(p0, p1);
    std::swap(x0, x1);
  }
  const MeshResult m = mesh_dijkstra(LeafProfile(field), p0, p1, x0, x1, mesh);
  c.mesh = m.length;
  c.resolution = static_cast<double>(m.resolution);
  c.tolerance = std::max(1e-4, 10.0 * c.resolution);
  c.agree = std::abs(c.clairaut - c.mesh) <= c.tolerance;
  return c;
}

double checked_leaf_distance(const HeightField& field, const LeafPoint& from, const LeafPoint& to,
                             const MeshOptions& mesh) {
  const DistanceCheck c = compare_distance_methods(field, from, to, mesh);
  if (!c.agree) {
    std::ostringstream os;
    os.precision(12);
    os << "clairaut " << c.clairaut << " and mesh-dijkstra " << c.mesh << " differ by more than "
       << c.tolerance;
    throw MethodDisagreement(os.str());
  }
  return c.clairaut;
}

double wedge_crossing_distance(const HeightField& field, int wedge, double eps) {
  const Segment& seg = field.model->segment(wedge);
  if (!seg.is_wedge()) throw ValidationError("wedge", "segment is not a wedge");
  const LeafPoint a{wedge, eps * seg.width, 0.0};
  const LeafPoint b{wedge, (1.0 - eps) * seg.width, 0.0};
  return leaf_distance(field, {a, b, DistanceMethod::clairaut, {}});
}

PeriodicGeodesic periodic_geodesic(const HeightField& field, double dx) {
  const LeafProfile prof(field);
  const ClairautIntegrals whole{prof, {{0, static_cast<Real>(field.model->total_width())}}};
  const Real c = clairaut_momentum(whole, std::abs(static_cast<Real>(dx)));
  std::vector<std::pair<Real, Real>> wedge_spans;
  const ModelSpec& model = *field.model;
  for (int k : model.wedge_indices())
    wedge_spans.emplace_back(model.segment_offset(k), model.segment_offset(k) + model.segment(k).width);
  PeriodicGeodesic g;
  g.momentum = static_cast<double>(c);
  const Real total = whole.length(c);
  const Real in_wedges = ClairautIntegrals{prof, wedge_spans}.length(c);
  g.length = static_cast<double>(total);
  g.wedge_part = static_cast<double>(in_wedges);
  g.off_wedge_part = static_cast<double>(total - in_wedges);
  return g;
}

double periodic_geodesic_length(const HeightField& field, double dx) {
  return periodic_geodesic(field, dx).length;
}

// ---------------------------------------------------------------------------
// Conformal flatness of the wedge slice h + dr^2

std::string to_string(FlatnessKind kind) {
  switch (kind) {
    case FlatnessKind::gauss_curvature: return "gauss_curvature";
    case FlatnessKind::cotton_norm: return "cotton_norm";
    case FlatnessKind::weyl_norm: return "weyl_norm";
  }
  return "gauss_curvature";
}

namespace {

// Regular grid over the cube around the ball |y| <= 0.5, extended by a halo of
// `halo` points so that every ball point admits the nested stencils. The slice
// metric does not depend on r, so r-derivatives vanish identically and only
// the d ball directions are differenced.
struct PatchGrid {
  int d = 1;
  int halo = 4;
  int side = 0;  // points per axis including the halo
  double h = 0.0;
  std::size_t size = 0;

  int coord(std::size_t idx, int axis) const {
    for (int a = 0; a < axis; ++a) idx /= static_cast<std::size_t>(side);
    return static_cast<int>(idx % static_cast<std::size_t>(side));
  }
  std::size_t offset(int axis) const {
    std::size_t o = 1;
    for (int a = 0; a < axis; ++a) o *= static_cast<std::size_t>(side);
    return o;
  }
  double y(std::size_t idx, int axis) const { return -0.5 + (coord(idx, axis) - halo) * h; }
  double radius2(std::size_t idx) const {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += y(idx, a) * y(idx, a);
    return r2;
  }
  int margin(std::size_t idx) const {
    int m = side;
    for (int a = 0; a < d; ++a) {
      const int c = coord(idx, a);
      m = std::min({m, c, side - 1 - c});
    }
    return m;
  }
};

// Fourth-order central difference of a per-point array along an axis.
double d4(const std::vector<double>& f, std::size_t idx, std::size_t stride, std::size_t comps,
          std::size_t comp, double h) {
  auto at = [&](std::ptrdiff_t k) {
    return f[(idx + static_cast<std::size_t>(static_cast<std::ptrdiff_t>(stride) * k)) * comps + comp];
  };
  return (at(-2) - 8 * at(-1) + 8 * at(1) - at(2)) / (12 * h);
}

}  // namespace

FlatnessDiagnostic conformal_flatness_diagnostic(int n, int resolution) {
  if (n < 2) throw BadDimension("dimension must be at least 2");
  if (resolution < 5)
    throw PatchTooCoarse("patch resolution " + std::to_string(resolution) +
                         " leaves no interior point (need at least 5 per axis)");
  FlatnessDiagnostic out;
  out.dimension = n;
  out.resolution = resolution;
  out.kind = n == 2 ? FlatnessKind::gauss_curvature
                    : (n == 3 ? FlatnessKind::cotton_norm : FlatnessKind::weyl_norm);
  PatchGrid grid;
  grid.d = n - 1;
  grid.halo = n == 3 ? 6 : 4;
  grid.side = resolution + 2 * grid.halo;
  grid.h = 1.0 / (resolution - 1);
  grid.size = 1;
  for (int a = 0; a < grid.d; ++a) grid.size *= static_cast<std::size_t>(grid.side);
  // Stencils of ball points reach at most halo * h beyond radius 0.5.
  const double reach2 = std::pow(0.5 + grid.halo * grid.h + 1e-9, 2);
  if (reach2 >= 1.0) throw PatchTooCoarse("patch stencils leave the Poincare ball");
  out.step = grid.h;
  const std::size_t N = static_cast<std::size_t>(n);
  const std::size_t N2 = N * N;
  const std::size_t N3 = N2 * N;
  auto needed = [&](std::size_t i, int m) { return grid.margin(i) >= m && grid.radius2(i) <= reach2; };

  // Metric and inverse: conformal factor 4/(1-|y|^2)^2 on the ball block.
  std::vector<double> g(grid.size * N2, 0.0), ginv(grid.size * N2, 0.0);
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double r2 = std::min(grid.radius2(i), reach2);
    const double phi2 = 4.0 / ((1.0 - r2) * (1.0 - r2));
    for (std::size_t a = 0; a < N; ++a) {
      const double v = a + 1 < N ? phi2 : 1.0;
      g[i * N2 + a * N + a] = v;
      ginv[i * N2 + a * N + a] = 1.0 / v;
    }
  }

  // Christoffel symbols Gamma^a_bc.
  std::vector<double> gamma(grid.size * N3, 0.0);
  std::vector<double> dg(N3);
  for (std::size_t i = 0; i < grid.size; ++i) {
    if (!needed(i, 2)) continue;
    for (std::size_t c = 0; c < N; ++c)
      for (std::size_t ab = 0; ab < N2; ++ab)
        dg[c * N2 + ab] =
            static_cast<int>(c) < grid.d ? d4(g, i, grid.offset(static_cast<int>(c)), N2, ab, grid.h) : 0.0;
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b)
        for (std::size_t c = 0; c < N; ++c) {
          double s = 0.0;
          for (std::size_t e = 0; e < N; ++e)
            s += ginv[i * N2 + a * N + e] *
                 (dg[b * N2 + e * N + c] + dg[c * N2 + e * N + b] - dg[e * N2 + b * N + c]);
          gamma[i * N3 + a * N2 + b * N + c] = 0.5 * s;
        }
  }

  auto inside = [&](std::size_t i) { return grid.radius2(i) <= 0.25 + 1e-12; };
  const bool weyl = n >= 4;
  const double nn = n;

  // Riemann tensor R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
  // with Ricci and scalar curvature; the Weyl norm is taken on the spot.
  std::vector<double> ricci(grid.size * N2, 0.0), scalar(grid.size, 0.0), weyl_norm(grid.size, 0.0);
  std::vector<double> dgam(N * N3), R(N2 * N2), Rl(N2 * N2);
  for (std::size_t i = 0; i < grid.size; ++i) {
    if (!needed(i, 4)) continue;
    if (weyl && !inside(i)) continue;
    for (std::size_t e = 0; e < N; ++e)
      for (std::size_t k = 0; k < N3; ++k)
        dgam[e * N3 + k] =
            static_cast<int>(e) < grid.d ? d4(gamma, i, grid.offset(static_cast<int>(e)), N3, k, grid.h) : 0.0;
    const double* G = &gamma[i * N3];
    auto Gm = [&](std::size_t a, std::size_t b, std::size_t c) { return G[a * N2 + b * N + c]; };
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b)
        for (std::size_t c = 0; c < N; ++c)
          for (std::size_t dd = 0; dd < N; ++dd) {
            double v = dgam[c * N3 + a * N2 + dd * N + b] - dgam[dd * N3 + a * N2 + c * N + b];
            for (std::size_t e = 0; e < N; ++e) v += Gm(a, c, e) * Gm(e, dd, b) - Gm(a, dd, e) * Gm(e, c, b);
            R[((a * N + b) * N + c) * N + dd] = v;
          }
    for (std::size_t b = 0; b < N; ++b)
      for (std::size_t dd = 0; dd < N; ++dd) {
        double v = 0.0;
        for (std::size_t a = 0; a < N; ++a) v += R[((a * N + b) * N + a) * N + dd];
        ricci[i * N2 + b * N + dd] = v;
      }
    double sc = 0.0;
    for (std::size_t b = 0; b < N; ++b)
      for (std::size_t dd = 0; dd < N; ++dd) sc += ginv[i * N2 + b * N + dd] * ricci[i * N2 + b * N + dd];
    scalar[i] = sc;
    if (!weyl) continue;
    auto gl = [&](std::size_t a, std::size_t b) { return g[i * N2 + a * N + b]; };
    auto rc = [&](std::size_t a, std::size_t b) { return ricci[i * N2 + a * N + b]; };
    // Metric is diagonal: lowering the first index is a scaling.
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t rest = 0; rest < N3; ++rest) Rl[a * N3 + rest] = gl(a, a) * R[a * N3 + rest];
    double norm2 = 0.0;
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b)
        for (std::size_t c = 0; c < N; ++c)
          for (std::size_t dd = 0; dd < N; ++dd) {
            double W = Rl[((a * N + b) * N + c) * N + dd];
            W -= (rc(a, c) * gl(b, dd) - rc(a, dd) * gl(b, c) + rc(b, dd) * gl(a, c) - rc(b, c) * gl(a, dd)) /
                 (nn - 2);
            W += sc * (gl(a, c) * gl(b, dd) - gl(a, dd) * gl(b, c)) / ((nn - 1) * (nn - 2));
            norm2 += W * W * ginv[i * N2 + a * N + a] * ginv[i * N2 + b * N + b] * ginv[i * N2 + c * N + c] *
                     ginv[i * N2 + dd * N + dd];
          }
    weyl_norm[i] = std::sqrt(norm2);
  }

  auto ricci_norm = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b)
        s += ricci[i * N2 + a * N + b] * ricci[i * N2 + a * N + b] * ginv[i * N2 + a * N + a] *
             ginv[i * N2 + b * N + b];
    return std::sqrt(s);
  };

  double sup = 0.0;
  double scale = 0.0;
  int points = 0;
  if (n == 2) {
    for (std::size_t i = 0; i < grid.size; ++i) {
      if (!inside(i)) continue;
      sup = std::max(sup, std::abs(0.5 * scalar[i]));
      ++points;
    }
  } else if (n == 3) {
    // Schouten tensor P = Ric - R g / 4 and Cotton C_ijk = D_k P_ij - D_j P_ik.
    std::vector<double> P(grid.size * N2, 0.0);
    for (std::size_t i = 0; i < grid.size; ++i)
      if (needed(i, 4))
        for (std::size_t ab = 0; ab < N2; ++ab) P[i * N2 + ab] = ricci[i * N2 + ab] - 0.25 * scalar[i] * g[i * N2 + ab];
    std::vector<double> dP(N * N2);
    for (std::size_t i = 0; i < grid.size; ++i) {
      if (!inside(i)) continue;
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t ab = 0; ab < N2; ++ab)
          dP[k * N2 + ab] =
              static_cast<int>(k) < grid.d ? d4(P, i, grid.offset(static_cast<int>(k)), N2, ab, grid.h) : 0.0;
      const double* G = &gamma[i * N3];
      auto cov = [&](std::size_t k, std::size_t a, std::size_t b) {
        double v = dP[k * N2 + a * N + b];
        for (std::size_t e = 0; e < N; ++e)
          v -= G[e * N2 + k * N + a] * P[i * N2 + e * N + b] + G[e * N2 + k * N + b] * P[i * N2 + a * N + e];
        return v;
      };
      double norm2 = 0.0;
      for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b)
          for (std::size_t c = 0; c < N; ++c) {
            const double C = cov(c, a, b) - cov(b, a, c);
            norm2 += C * C * ginv[i * N2 + a * N + a] * ginv[i * N2 + b * N + b] * ginv[i * N2 + c * N + c];
          }
      sup = std::max(sup, std::sqrt(norm2));
      scale = std::max(scale, std::pow(ricci_norm(i), 1.5));
      ++points;
    }
  } else {
    for (std::size_t i = 0; i < grid.size; ++i) {
      if (!inside(i)) continue;
      sup = std::max(sup, weyl_norm[i]);
      scale = std::max(scale, ricci_norm(i));
      ++points;
    }
  }
  if (points == 0) throw PatchTooCoarse("no patch point inside the ball");
  out.sup_norm = sup;
  out.curvature_scale = scale;
  out.relative = scale > 0.0 ? sup / scale : sup;
  out.points = points;
  return out;
}

}  // namespace cmclab
