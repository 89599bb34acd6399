#include "cmclab/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace cmclab {

namespace {

using Real = long double;
using Dual3 = Dual<3, Real>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using SparseMatrix = Eigen::SparseMatrix<Real>;

constexpr Real kSpacelikeMargin = 1e-8L;
constexpr Real kRelativeSettle = 1e-12L;

// Discrete layout of the rescaled problem. Every piece owns cells + 3
// unknowns: a ghost on each side plus its nodes. Rows are laid out the same
// way: the left end equation, the node equations, the right end equation.
struct Layout {
  std::vector<Piece> pieces;
  std::vector<int> cells;
  std::vector<int> base;
  std::vector<Real> h;
  std::vector<Real> ref;
  int size = 0;
  int n = 2;
  Closure closure = Closure::truncated;
  OuterBoundary boundary = OuterBoundary::neumann;

  int index(int p, int j) const { return base[static_cast<std::size_t>(p)] + j + 1; }
};

Layout make_layout(const ModelSpec& scaled, const std::vector<int>& cells) {
  Layout lay;
  lay.pieces = scaled.pieces();
  lay.cells = cells;
  lay.n = scaled.dimension();
  lay.closure = scaled.closure();
  lay.boundary = scaled.outer_boundary();
  const Real collar_ref = Real(lay.n) / Real(lay.n - 1);
  for (std::size_t p = 0; p < lay.pieces.size(); ++p) {
    lay.base.push_back(lay.size);
    lay.size += cells[p] + 3;
    lay.h.push_back(Real(lay.pieces[p].width) / Real(cells[p]));
    lay.ref.push_back(lay.pieces[p].is_wedge() ? Real(1) : collar_ref);
  }
  return lay;
}

Real chain_scale(const Layout& lay, int p, Real u) {
  return lay.pieces[static_cast<std::size_t>(p)].is_wedge() ? Real(1) : u;
}

// Residual F(v), Jacobian J(v), and the Newton target J(v) v - F(v). The
// Newton iterate is obtained by solving J x = target directly rather than as
// v + delta: on the node rows the target is assembled from the quadratic
// remainder alone, which keeps relative precision where v is exponentially
// small and v + delta would cancel.
struct Assembly {
  Vector residual;
  Vector target;
  std::vector<Eigen::Triplet<Real>> triplets;
};

void assemble(const Layout& lay, const Vector& v, Assembly& out, bool jacobian) {
  out.residual.setZero(lay.size);
  out.target.setZero(lay.size);
  out.triplets.clear();
  if (jacobian) out.triplets.reserve(static_cast<std::size_t>(lay.size) * 4);
  auto add = [&](int row, int col, Real value) {
    if (jacobian) out.triplets.emplace_back(row, col, value);
  };
  const int np = static_cast<int>(lay.pieces.size());
  for (int p = 0; p < np; ++p) {
    const Piece& piece = lay.pieces[static_cast<std::size_t>(p)];
    const int cells = lay.cells[static_cast<std::size_t>(p)];
    const Real h = lay.h[static_cast<std::size_t>(p)];
    for (int j = 0; j <= cells; ++j) {
      const int im = lay.index(p, j - 1);
      const int i0 = lay.index(p, j);
      const int ip = lay.index(p, j + 1);
      const Dual3 a = Dual3::variable(v[im], 0);
      const Dual3 b = Dual3::variable(v[i0], 1);
      const Dual3 c = Dual3::variable(v[ip], 2);
      const Dual3 du = (c - a) / Dual3(2 * h);
      const Dual3 d2u = (c - Dual3(2) * b + a) / Dual3(h * h);
      const double slope = warp_slope(piece, static_cast<double>(j * h));
      const Dual3 lin = curvature_excess_linear(lay.n, piece.kind, b, du, d2u, slope);
      const Dual3 rem = curvature_excess_remainder(lay.n, piece.kind, b, du, d2u, slope);
      out.residual[i0] = lin.v + rem.v;
      out.target[i0] = rem.d[0] * v[im] + rem.d[1] * v[i0] + rem.d[2] * v[ip] - rem.v;
      add(i0, im, lin.d[0] + rem.d[0]);
      add(i0, i0, lin.d[1] + rem.d[1]);
      add(i0, ip, lin.d[2] + rem.d[2]);
    }
  }

  // Seams: continuity in the right-end row of the left piece, matching of the
  // proper-length slope d rho / d sigma in the left-end row of the right piece.
  const int seams = lay.closure == Closure::periodic ? np : np - 1;
  for (int s = 0; s < seams; ++s) {
    const int p = s;
    const int q = (s + 1) % np;
    const int np_cells = lay.cells[static_cast<std::size_t>(p)];
    const Real hp = lay.h[static_cast<std::size_t>(p)];
    const Real hq = lay.h[static_cast<std::size_t>(q)];
    const int pN = lay.index(p, np_cells);
    const int pNm = lay.index(p, np_cells - 1);
    const int pNp = lay.index(p, np_cells + 1);
    const int q0 = lay.index(q, 0);
    const int qm = lay.index(q, -1);
    const int qp = lay.index(q, 1);
    const int row_c = lay.base[static_cast<std::size_t>(p)] + np_cells + 2;
    const int row_d = lay.base[static_cast<std::size_t>(q)];

    const Real up = lay.ref[static_cast<std::size_t>(p)] + v[pN];
    const Real uq = lay.ref[static_cast<std::size_t>(q)] + v[q0];
    out.residual[row_c] = up - uq;
    out.target[row_c] = lay.ref[static_cast<std::size_t>(q)] - lay.ref[static_cast<std::size_t>(p)];
    add(row_c, pN, 1);
    add(row_c, q0, -1);

    const Real dp = (v[pNp] - v[pNm]) / (2 * hp);
    const Real dq = (v[qp] - v[qm]) / (2 * hq);
    const Real ap = chain_scale(lay, p, up);
    const Real aq = chain_scale(lay, q, uq);
    out.residual[row_d] = dp / ap - dq / aq;
    add(row_d, pNp, 1 / (2 * hp * ap));
    add(row_d, pNm, -1 / (2 * hp * ap));
    add(row_d, qp, -1 / (2 * hq * aq));
    add(row_d, qm, 1 / (2 * hq * aq));
    // The slope terms are linear in v; only the 1/u factors of collar sides
    // contribute to the target.
    const bool p_collar = !lay.pieces[static_cast<std::size_t>(p)].is_wedge();
    const bool q_collar = !lay.pieces[static_cast<std::size_t>(q)].is_wedge();
    Real target = 0;
    if (p_collar) {
      add(row_d, pN, -dp / (ap * ap));
      target -= dp / (ap * ap) * v[pN];
    }
    if (q_collar) {
      add(row_d, q0, dq / (aq * aq));
      target += dq / (aq * aq) * v[q0];
    }
    out.target[row_d] = target;
  }

  if (lay.closure == Closure::truncated) {
    const Real cone = Real(lay.n) / Real(lay.n - 1);
    // Left end of the first piece.
    {
      const int row = lay.base[0];
      const Real h = lay.h[0];
      if (lay.boundary == OuterBoundary::neumann) {
        out.residual[row] = (v[lay.index(0, 1)] - v[lay.index(0, -1)]) / (2 * h);
        add(row, lay.index(0, 1), 1 / (2 * h));
        add(row, lay.index(0, -1), -1 / (2 * h));
      } else {
        out.residual[row] = lay.ref[0] + v[lay.index(0, 0)] - cone;
        out.target[row] = cone - lay.ref[0];
        add(row, lay.index(0, 0), 1);
      }
    }
    // Right end of the last piece.
    {
      const int p = np - 1;
      const int cells = lay.cells[static_cast<std::size_t>(p)];
      const int row = lay.base[static_cast<std::size_t>(p)] + cells + 2;
      const Real h = lay.h[static_cast<std::size_t>(p)];
      if (lay.boundary == OuterBoundary::neumann) {
        out.residual[row] = (v[lay.index(p, cells + 1)] - v[lay.index(p, cells - 1)]) / (2 * h);
        add(row, lay.index(p, cells + 1), 1 / (2 * h));
        add(row, lay.index(p, cells - 1), -1 / (2 * h));
      } else {
        out.residual[row] = lay.ref[static_cast<std::size_t>(p)] + v[lay.index(p, cells)] - cone;
        out.target[row] = cone - lay.ref[static_cast<std::size_t>(p)];
        add(row, lay.index(p, cells), 1);
      }
    }
  }
}

Real sup_norm(const Vector& r) { return r.size() ? r.cwiseAbs().maxCoeff() : Real(0); }

// Smallest spacelike margin over all nodes; negative heights count as -1.
Real min_margin(const Layout& lay, const Vector& v) {
  Real worst = 1;
  for (std::size_t p = 0; p < lay.pieces.size(); ++p) {
    const int pi = static_cast<int>(p);
    for (int j = 0; j <= lay.cells[p]; ++j) {
      const Real u = lay.ref[p] + v[lay.index(pi, j)];
      if (!(u > 0)) return -1;
      const Real du = (v[lay.index(pi, j + 1)] - v[lay.index(pi, j - 1)]) / (2 * lay.h[p]);
      const Real slope = du / chain_scale(lay, pi, u);
      worst = std::min(worst, 1 - slope * slope);
    }
  }
  return worst;
}

HeightField make_field(const ModelSpec& model, double tau, double lambda, const Layout& lay,
                       const Vector& v, const Vector& residual) {
  HeightField f;
  f.model = std::make_shared<const ModelSpec>(model);
  f.tau = tau;
  f.lambda = lambda;
  const std::vector<Piece> pieces = model.pieces();
  const Real lam = lambda;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const int pi = static_cast<int>(p);
    const bool wedge = pieces[p].is_wedge();
    const Real h = lay.h[p];
    PieceRange range;
    range.piece = pieces[p];
    range.first = static_cast<int>(f.nodes.size());
    range.cells = lay.cells[p];
    range.h = static_cast<double>(wedge ? h / lam : h);
    f.pieces.push_back(range);
    for (int j = 0; j <= lay.cells[p]; ++j) {
      const Real a = v[lay.index(pi, j - 1)];
      const Real b = v[lay.index(pi, j)];
      const Real c = v[lay.index(pi, j + 1)];
      HeightNode node;
      node.piece = pi;
      node.segment = pieces[p].segment;
      node.excess = b;
      node.excess_slope = (c - a) / (2 * h);
      node.excess_curvature = (c - 2 * b + a) / (h * h);
      const Real local = Real(j) * h;
      node.xi = static_cast<double>(pieces[p].xi_begin + (wedge ? local / lam : local));
      node.u = static_cast<double>((lay.ref[p] + b) / lam);
      node.du = static_cast<double>(wedge ? node.excess_slope : node.excess_slope / lam);
      node.d2u = static_cast<double>(wedge ? node.excess_curvature * lam : node.excess_curvature / lam);
      node.residual = static_cast<double>(residual[lay.index(pi, j)]);
      f.nodes.push_back(node);
    }
  }
  if (!f.pieces.empty() && pieces.front().is_wedge() == false) {
    // nothing: collar pieces keep xi_begin in collar units already
  }
  return f;
}

void initial_guess(const Layout& lay, const SolverConfig& config, const HeightField* previous,
                   const ModelSpec& scaled, Vector& v) {
  v.resize(lay.size);
  const Real n = lay.n;
  const Real mid = (1 + n / (n - 1)) / 2;
  HeightField prev_scaled;
  const bool use_prev = config.initial_guess == InitialGuess::continuation && previous != nullptr;
  if (use_prev) prev_scaled = previous->rescale();
  for (std::size_t p = 0; p < lay.pieces.size(); ++p) {
    const Piece& piece = lay.pieces[p];
    for (int j = -1; j <= lay.cells[p] + 1; ++j) {
      Real u = mid;
      if (config.initial_guess == InitialGuess::reference_levels) u = lay.ref[p];
      if (use_prev) {
        const int jj = std::clamp(j, 0, lay.cells[p]);
        double xi = static_cast<double>(piece.xi_begin + Real(jj) * lay.h[p]);
        const Segment& seg_new = scaled.segment(piece.segment);
        const Segment& seg_old = prev_scaled.model->segment(piece.segment);
        if (seg_new.is_wedge()) {
          // Map by distance to the nearest wedge end so boundary layers line up.
          const double half_old = 0.5 * seg_old.width;
          if (xi <= 0.5 * seg_new.width)
            xi = std::min(xi, half_old);
          else
            xi = seg_old.width - std::min(seg_new.width - xi, half_old);
        }
        u = prev_scaled.height_at(piece.segment, std::clamp(xi, 0.0, seg_old.width));
      }
      v[lay.index(static_cast<int>(p), j)] = u - lay.ref[p];
    }
  }
}

}  // namespace

std::string to_string(InitialGuess guess) {
  switch (guess) {
    case InitialGuess::barrier_midpoint: return "barrier_midpoint";
    case InitialGuess::reference_levels: return "reference_levels";
    case InitialGuess::continuation: return "continuation";
  }
  return "barrier_midpoint";
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw ValidationError("solver.tolerance", "must be positive");
  if (max_iterations < 1) throw ValidationError("solver.max_iterations", "must be at least 1");
  if (min_cells < 16) throw ValidationError("solver.min_cells", "must be at least 16");
  if (!(cells_per_unit > 0.0)) throw ValidationError("solver.cells_per_unit", "must be positive");
  if (!(min_damping > 0.0 && min_damping <= 1.0))
    throw ValidationError("solver.min_damping", "must lie in (0, 1]");
  if (polish_iterations < 0) throw ValidationError("solver.polish_iterations", "must be non-negative");
}

std::vector<int> piece_cells(const ModelSpec& model, double tau, const SolverConfig& config) {
  const double lambda = rescaling_factor(model.dimension(), tau);
  const ModelSpec scaled = model.rescaled(lambda);
  std::vector<int> cells;
  for (const Piece& p : scaled.pieces())
    cells.push_back(std::max(config.min_cells,
                             static_cast<int>(std::ceil(config.cells_per_unit * p.width - 1e-9))));
  return cells;
}

HeightField solve_cmc_leaf(const ModelSpec& model, double tau, const SolverConfig& config,
                           const HeightField* previous) {
  config.validate();
  const double lambda = rescaling_factor(model.dimension(), tau);
  const ModelSpec scaled = model.rescaled(lambda);
  const Layout lay = make_layout(scaled, piece_cells(model, tau, config));

  Vector v;
  initial_guess(lay, config, previous, scaled, v);
  if (!(min_margin(lay, v) > kSpacelikeMargin))
    throw NotSpacelike("initial guess violates the spacelike graph condition");

  Assembly sys;
  assemble(lay, v, sys, true);
  Real sup = sup_norm(sys.residual);
  Real merit = sys.residual.squaredNorm();

  SparseMatrix jac(lay.size, lay.size);
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;

  // Full Newton iterate J^{-1} (J v - F).
  auto newton_iterate = [&](Vector& next) -> bool {
    jac.setFromTriplets(sys.triplets.begin(), sys.triplets.end());
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) return false;
    next = lu.solve(sys.target);
    return lu.info() == Eigen::Success && next.allFinite();
  };

  auto fail = [&](const std::string& why, int iterations) -> NoConvergence {
    HeightField partial = make_field(model, tau, lambda, lay, v, sys.residual);
    partial.residual_norm = static_cast<double>(sup);
    partial.converged = false;
    partial.iterations = iterations;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s after %d iterations (residual %.3Le, tolerance %.3e)",
                  why.c_str(), iterations, sup, config.tolerance);
    return NoConvergence(buf, std::move(partial));
  };

  int it = 0;
  Vector full;
  Vector trial;
  Assembly trial_sys;
  while (!(sup < config.tolerance)) {
    if (it >= config.max_iterations) throw fail("Newton iteration did not reach the tolerance", it);
    if (!newton_iterate(full)) throw fail("singular Newton system", it);
    Real step = 1;
    bool accepted = false;
    while (step >= Real(config.min_damping)) {
      if (step == 1)
        trial = full;
      else
        trial = v + step * (full - v);
      if (min_margin(lay, trial) > kSpacelikeMargin) {
        assemble(lay, trial, trial_sys, true);
        const Real trial_merit = trial_sys.residual.squaredNorm();
        if (std::isfinite(static_cast<double>(trial_merit)) &&
            trial_merit < (1 - Real(1e-4) * step) * merit) {
          accepted = true;
          break;
        }
      }
      step /= 2;
    }
    ++it;
    if (!accepted) throw fail("damped Newton step stalled", it);
    v.swap(trial);
    std::swap(sys, trial_sys);
    sup = sup_norm(sys.residual);
    merit = sys.residual.squaredNorm();
  }

  // Newton contracts the deviation quadratically in the wedge interiors, where
  // it is far below the residual floor; keep stepping until every unknown is
  // stable to relative precision.
  for (int k = 0; k < config.polish_iterations; ++k) {
    if (!newton_iterate(trial)) break;
    if (!(min_margin(lay, trial) > kSpacelikeMargin)) break;
    assemble(lay, trial, trial_sys, true);
    const Real trial_sup = sup_norm(trial_sys.residual);
    if (!(trial_sup <= std::max(sup, Real(config.tolerance)))) break;
    bool settled = true;
    for (Eigen::Index i = 0; i < trial.size() && settled; ++i)
      settled = std::abs(trial[i] - v[i]) <= kRelativeSettle * std::abs(trial[i]);
    v.swap(trial);
    std::swap(sys, trial_sys);
    sup = trial_sup;
    if (settled) break;
  }

  HeightField field = make_field(model, tau, lambda, lay, v, sys.residual);
  field.residual_norm = static_cast<double>(sup);
  field.converged = true;
  field.iterations = it;
  return field;
}

double HeightField::chain_coordinate(int node) const {
  const HeightNode& p = nodes.at(static_cast<std::size_t>(node));
  return model->segment_offset(p.segment) + p.xi;
}

double HeightField::reference_level_scaled(const Piece& piece) const {
  const int n = dimension();
  return piece.is_wedge() ? 1.0 : static_cast<double>(n) / (n - 1);
}

double HeightField::reference_level(const Piece& piece) const {
  return reference_level_scaled(piece) / lambda;
}

HeightField HeightField::rescale() const {
  HeightField out;
  out.model = std::make_shared<const ModelSpec>(model->rescaled(lambda));
  const int n = dimension();
  out.tau = -(n - 1.0);
  out.lambda = 1.0;
  out.residual_norm = residual_norm;
  out.converged = converged;
  out.iterations = iterations;
  out.pieces = pieces;
  const std::vector<Piece> scaled_pieces = out.model->pieces();
  for (std::size_t p = 0; p < out.pieces.size(); ++p) {
    out.pieces[p].piece = scaled_pieces[p];
    if (scaled_pieces[p].is_wedge()) out.pieces[p].h *= lambda;
  }
  out.nodes = nodes;
  for (HeightNode& node : out.nodes) {
    const bool wedge = pieces[static_cast<std::size_t>(node.piece)].piece.is_wedge();
    const double xi_begin = pieces[static_cast<std::size_t>(node.piece)].piece.xi_begin;
    const double scaled_begin = scaled_pieces[static_cast<std::size_t>(node.piece)].xi_begin;
    if (wedge) {
      node.xi = scaled_begin + (node.xi - xi_begin) * lambda;
      node.d2u /= lambda;
    } else {
      node.du *= lambda;
      node.d2u *= lambda;
    }
    node.u *= lambda;
  }
  return out;
}

double HeightField::height_at(int segment, double xi) const {
  for (const PieceRange& r : pieces) {
    if (r.piece.segment != segment) continue;
    const double local = xi - r.piece.xi_begin;
    if (local < -1e-12 * std::max(1.0, r.piece.width) || local > r.piece.width * (1 + 1e-12)) continue;
    const double t = std::clamp(local / r.h, 0.0, static_cast<double>(r.cells));
    const int j = std::min(static_cast<int>(t), r.cells - 1);
    const double s = t - j;
    const HeightNode& a = nodes[static_cast<std::size_t>(r.first + j)];
    const HeightNode& b = nodes[static_cast<std::size_t>(r.first + j + 1)];
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * a.u + h10 * r.h * a.du + h01 * b.u + h11 * r.h * b.du;
  }
  throw ChartError("chain point not covered by the field");
}

long double barrier_margin(const HeightField& field) {
  const long double n = field.dimension();
  const long double upper = n / (n - 1);
  long double worst = std::numeric_limits<long double>::infinity();
  for (const HeightNode& node : field.nodes) {
    const bool wedge = field.pieces[static_cast<std::size_t>(node.piece)].piece.is_wedge();
    const long double ref = wedge ? 1.0L : upper;
    // lambda u = ref + excess; distances to 1 and n/(n-1).
    const long double lower_gap = (ref - 1.0L) + node.excess;
    const long double upper_gap = (upper - ref) - node.excess;
    worst = std::min({worst, lower_gap, upper_gap});
  }
  return worst;
}

bool barrier_is_strict(const ModelSpec& model) { return model.has_wedge() && model.has_collar(); }

double min_embedded_convexity(const HeightField& field) {
  double worst = std::numeric_limits<double>::infinity();
  const double lambda = field.lambda;
  for (const HeightNode& node : field.nodes) {
    if (!field.pieces[static_cast<std::size_t>(node.piece)].piece.is_wedge()) continue;
    // Rescaled jet of the height in the wedge.
    const double u = node.u * lambda;
    const double du = node.du;
    const double d2u = node.d2u / lambda;
    for (double y_rel : {0.0, 0.5, 1.0, 2.0}) {
      const double y2 = (y_rel * u) * (y_rel * u);
      const double q = u * u + y2;
      const double second = ((du * du + u * d2u) * q - u * u * du * du) / (q * std::sqrt(q));
      worst = std::min(worst, second);
    }
  }
  return worst;
}

void write_height_field_csv(const HeightField& field, std::ostream& os) {
  os << "xi,segment,u,du,d2u,residual\n";
  char buf[256];
  for (std::size_t i = 0; i < field.nodes.size(); ++i) {
    const HeightNode& n = field.nodes[i];
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g,%.17g\n",
                  field.chain_coordinate(static_cast<int>(i)), n.segment, n.u, n.du, n.d2u,
                  n.residual);
    os << buf;
  }
}

}  // namespace cmclab
