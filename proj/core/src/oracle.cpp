#include "cmclab/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cmclab/errors.hpp"

namespace cmclab {

namespace {

using Real = long double;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

struct LocalGraph {
  int n = 2;
  bool wedge = true;
  Real u0 = 1, du = 0, d2u = 0;  // rescaled jet at the sample
  Real s0 = 0, s_slope = 0;      // collar parameter and its rate

  // Coordinates c = (x_1 .. x_{n-1}, t) with t the chain offset from the node.
  Vec embed(const Vec& c) const {
    const int m = n - 1;
    Vec X(n + 1);
    Real r2 = 0;
    for (int i = 0; i < m; ++i) r2 += c[i] * c[i];
    const Real t = c[m];
    const Real u = u0 + du * t + d2u * t * t / 2;
    Real scale = u;
    if (!wedge) scale = u * std::cosh(s0 + s_slope * t);
    X[0] = scale * std::sqrt(1 + r2);
    for (int i = 0; i < m; ++i) X[1 + i] = scale * c[i];
    X[n] = wedge ? t : u * std::sinh(s0 + s_slope * t);
    return X;
  }
};

Real minkowski(const Vec& a, const Vec& b) {
  Real s = -a[0] * b[0];
  for (Eigen::Index i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Mean curvature at the origin of the chart by centered differences.
Real fd_mean_curvature(const LocalGraph& g, Real h) {
  const int n = g.n;
  const Vec origin = Vec::Zero(n);
  auto at = [&](int a, Real da, int b, Real db) {
    Vec c = origin;
    if (a >= 0) c[a] += da;
    if (b >= 0) c[b] += db;
    return g.embed(c);
  };
  const Vec X0 = g.embed(origin);
  std::vector<Vec> Xa(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) Xa[static_cast<std::size_t>(a)] = (at(a, h, -1, 0) - at(a, -h, -1, 0)) / (2 * h);
  std::vector<std::vector<Vec>> Xab(static_cast<std::size_t>(n), std::vector<Vec>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a) {
    Xab[a][a] = (at(a, h, -1, 0) - 2 * X0 + at(a, -h, -1, 0)) / (h * h);
    for (int b = a + 1; b < n; ++b) {
      const Vec mixed =
          (at(a, h, b, h) - at(a, h, b, -h) - at(a, -h, b, h) + at(a, -h, b, -h)) / (4 * h * h);
      Xab[a][b] = mixed;
      Xab[b][a] = mixed;
    }
  }
  Mat metric(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) metric(a, b) = minkowski(Xa[a], Xa[b]);
  Eigen::LLT<Mat> llt(metric);
  if (llt.info() != Eigen::Success)
    throw StepTooLarge("differenced induced metric is not positive definite");

  // Normal: kernel of the n x (n+1) system <N, X_a> = 0.
  Mat rows(n, n + 1);
  for (int a = 0; a < n; ++a) {
    rows(a, 0) = -Xa[a][0];
    for (int k = 1; k <= n; ++k) rows(a, k) = Xa[a][k];
  }
  Eigen::FullPivLU<Mat> lu(rows);
  const Mat kernel = lu.kernel();
  Vec N = kernel.col(0);
  const Real nn = minkowski(N, N);
  if (!(nn < 0)) throw StepTooLarge("differenced normal is not timelike");
  N /= std::sqrt(-nn);
  if (N[0] < 0) N = -N;

  Mat K(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) K(a, b) = minkowski(N, Xab[a][b]);
  const Mat inv = llt.solve(Mat::Identity(n, n));
  return (inv.cwiseProduct(K)).sum();
}

LocalGraph local_graph(const HeightField& scaled, int node) {
  const HeightNode& p = scaled.nodes.at(static_cast<std::size_t>(node));
  const Piece& piece = scaled.pieces[static_cast<std::size_t>(p.piece)].piece;
  LocalGraph g;
  g.n = scaled.dimension();
  g.wedge = piece.is_wedge();
  const Real ref = g.wedge ? Real(1) : Real(g.n) / Real(g.n - 1);
  g.u0 = ref + p.excess;
  g.du = p.excess_slope;
  g.d2u = p.excess_curvature;
  if (!g.wedge) {
    g.s0 = piece.collar_parameter(p.xi - piece.xi_begin);
    g.s_slope = piece.s_slope;
  }
  return g;
}

}  // namespace

std::vector<OracleSample> fd_mean_curvature_oracle(const HeightField& field,
                                                   const std::vector<int>& nodes,
                                                   const OracleOptions& options) {
  if (!(options.step > 0.0)) throw ValidationError("oracle.step", "must be positive");
  const HeightField scaled = field.rescale();
  const int n = field.dimension();
  const Real target = -(n - 1);
  std::vector<OracleSample> out;
  out.reserve(nodes.size());
  for (int node : nodes) {
    const LocalGraph g = local_graph(scaled, node);
    // Richardson table on h, h/2, h/4, ...
    std::vector<Real> col;
    Real h = options.step;
    for (int level = 0; level <= options.richardson_levels; ++level, h /= 2)
      col.push_back(fd_mean_curvature(g, h));
    Real factor = 4;
    for (int level = 0; level < options.richardson_levels; ++level, factor *= 4)
      for (std::size_t i = 0; i + 1 < col.size() - level; ++i)
        col[i] = (factor * col[i + 1] - col[i]) / (factor - 1);
    const Real H = col.front();
    OracleSample s;
    s.node = node;
    s.xi = field.chain_coordinate(node);
    s.mean_curvature = static_cast<double>(H * field.lambda);
    s.relative_residual = static_cast<double>(std::abs(H - target) / -target);
    s.residual = s.relative_residual * std::abs(field.tau);
    out.push_back(s);
  }
  return out;
}

std::vector<int> interior_nodes(const HeightField& field, int stride) {
  std::vector<int> out;
  const int count = static_cast<int>(field.nodes.size());
  const bool truncated = field.model->closure() == Closure::truncated;
  for (int i = 0; i < count; i += std::max(1, stride)) {
    if (truncated && (i == 0 || i == count - 1)) continue;
    out.push_back(i);
  }
  return out;
}

OracleOrderStudy oracle_order_study(const HeightField& field, const std::vector<int>& nodes,
                                    double step, int levels) {
  OracleOrderStudy study;
  double h = step;
  for (int k = 0; k < levels; ++k, h /= 2) {
    double sup = 0.0;
    for (const OracleSample& s : fd_mean_curvature_oracle(field, nodes, {h, 0}))
      sup = std::max(sup, s.relative_residual);
    study.steps.push_back(h);
    study.sup_relative_residual.push_back(sup);
  }
  for (std::size_t k = 1; k < study.sup_relative_residual.size(); ++k)
    study.orders.push_back(
        std::log2(study.sup_relative_residual[k - 1] / study.sup_relative_residual[k]));
  if (!study.orders.empty()) study.measured_order = study.orders.back();
  return study;
}

}  // namespace cmclab
