#include "cmclab/kasner.hpp"

#include <algorithm>
#include <cmath>

#include "cmclab/errors.hpp"

namespace cmclab {

namespace {

std::vector<double> to_double(const std::vector<long double>& v) {
  return std::vector<double>(v.begin(), v.end());
}

}  // namespace

bool strictly_decreasing(const std::vector<long double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] < values[i - 1])) return false;
  return true;
}

KasnerLimitReport kasner_limit_check(const std::vector<HeightField>& ladder,
                                     const KasnerLimitOptions& options) {
  if (ladder.size() < 4)
    throw InsufficientLadder("Kasner limit check needs at least 4 ladder points, got " +
                             std::to_string(ladder.size()));
  const ModelSpec& model = *ladder.front().model;
  int wedge = options.wedge;
  if (wedge < 0) {
    const std::vector<int> wedges = model.wedge_indices();
    if (wedges.empty()) throw ValidationError("wedge", "model has no wedge segment");
    wedge = wedges.front();
  }
  if (wedge >= model.segment_count() || !model.segment(wedge).is_wedge())
    throw ValidationError("wedge", "segment " + std::to_string(wedge) + " is not a wedge");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!ladder[i].converged) throw InsufficientLadder("ladder contains an unconverged field");
    if (!(*ladder[i].model == model)) throw ValidationError("ladder", "fields of different models");
    if (i > 0 && !(ladder[i].lambda > ladder[i - 1].lambda))
      throw ValidationError("ladder", "lambda must be strictly increasing");
  }

  const int n = model.dimension();
  const double width = model.segment(wedge).width;
  const double a = options.compact_begin * width;
  const double b = options.compact_end * width;
  const double slack = 1e-12 * width;

  KasnerLimitReport report;
  report.derivative_bound_theory = 1.0 / (n - 1);
  for (double eps : options.epsilons) report.derivative_bounds.push_back({eps * width, {}, 0.0});

  for (const HeightField& f : ladder) {
    report.lambdas.push_back(f.lambda);
    long double dev = 0, slope = 0, curv = 0;
    std::vector<long double> edge(report.derivative_bounds.size(), 0);
    for (const HeightNode& node : f.nodes) {
      if (node.segment != wedge) continue;
      if (node.xi >= a - slack && node.xi <= b + slack) {
        dev = std::max(dev, std::abs(node.excess));
        slope = std::max(slope, std::abs(node.excess_slope));
        curv = std::max(curv, std::abs(node.excess_curvature));
      }
      for (std::size_t k = 0; k < edge.size(); ++k) {
        const double eps = report.derivative_bounds[k].epsilon;
        if (node.xi >= eps - slack && node.xi <= width - eps + slack)
          edge[k] = std::max(edge[k], std::abs(node.excess_slope));
      }
    }
    report.sup_deviation.push_back(dev);
    report.sup_slope.push_back(slope);
    report.sup_curvature.push_back(curv);
    for (std::size_t k = 0; k < edge.size(); ++k) {
      DerivativeBound& db = report.derivative_bounds[k];
      // d u_tau / dr equals the rescaled slope.
      const double c = static_cast<double>(f.lambda * db.epsilon * edge[k]);
      db.scaled_slope.push_back(c);
      db.constant = std::max(db.constant, c);
    }
  }

  report.deviation_decreasing = strictly_decreasing(report.sup_deviation);
  report.slope_decreasing = strictly_decreasing(report.sup_slope);
  report.curvature_decreasing = strictly_decreasing(report.sup_curvature);
  report.deviation_fit = fit_convergence(report.lambdas, to_double(report.sup_deviation));
  report.slope_fit = fit_convergence(report.lambdas, to_double(report.sup_slope));
  report.curvature_fit = fit_convergence(report.lambdas, to_double(report.sup_curvature));

  // Log-linear regression over the nonzero deviations.
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < report.lambdas.size(); ++i)
    if (report.sup_deviation[i] > 0) {
      xs.push_back(report.lambdas[i]);
      ys.push_back(static_cast<double>(-std::log(report.sup_deviation[i])));
    }
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= xs.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx > 0) report.exponential_rate = sxy / sxx;
  }
  report.predicted_exponential_rate = std::sqrt(n - 1.0) * std::min(a, width - b);
  return report;
}

}  // namespace cmclab
