#include "cmclab/fit.hpp"

#include <algorithm>
#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "cmclab/errors.hpp"

namespace cmclab {

namespace {

constexpr double kMinRate = 1e-3;
constexpr double kMaxRate = 12.0;

struct LinearFit {
  double limit = 0.0;
  double constant = 0.0;
  double ssr = std::numeric_limits<double>::infinity();
};

// Least squares for v = L + C x with x = lambda^-p.
LinearFit fit_fixed_rate(const std::vector<double>& lambdas, const std::vector<double>& values,
                         double p) {
  const std::size_t n = lambdas.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(lambdas[i], -p);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mv = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sxx = 0.0;
  double sxv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxv += (x[i] - mx) * (values[i] - mv);
  }
  LinearFit f;
  if (!(sxx > 0.0)) return f;
  f.constant = sxv / sxx;
  f.limit = mv - f.constant * mx;
  f.ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = values[i] - f.limit - f.constant * x[i];
    f.ssr += r * r;
  }
  return f;
}

// Stage 1: best p on a log grid, refined by Brent's method.
double best_rate(const std::vector<double>& lambdas, const std::vector<double>& values) {
  auto objective = [&](double p) { return fit_fixed_rate(lambdas, values, p).ssr; };
  const int grid = 240;
  double best_p = kMinRate;
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  auto grid_p = [&](int i) {
    return kMinRate * std::pow(kMaxRate / kMinRate, static_cast<double>(i) / grid);
  };
  for (int i = 0; i <= grid; ++i) {
    const double val = objective(grid_p(i));
    if (val < best) {
      best = val;
      best_p = grid_p(i);
      best_i = i;
    }
  }
  const double lo = grid_p(std::max(0, best_i - 1));
  const double hi = grid_p(std::min(grid, best_i + 1));
  boost::uintmax_t max_iter = 200;
  const auto r = boost::math::tools::brent_find_minima(objective, lo, hi,
                                                       std::numeric_limits<double>::digits,
                                                       max_iter);
  return r.second <= best ? r.first : best_p;
}

// Gauss-Newton on (L, C, p) jointly; Brent locates p only to about sqrt(eps)
// because the objective is flat at its minimum.
LinearFit polish(const std::vector<double>& lambdas, const std::vector<double>& values, double& p) {
  LinearFit best = fit_fixed_rate(lambdas, values, p);
  double L = best.limit;
  double C = best.constant;
  const Eigen::Index n = static_cast<Eigen::Index>(lambdas.size());
  for (int it = 0; it < 20; ++it) {
    Eigen::MatrixXd J(n, 3);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = std::pow(lambdas[i], -p);
      r[i] = values[i] - L - C * x;
      J(i, 0) = 1.0;
      J(i, 1) = x;
      J(i, 2) = -C * std::log(lambdas[i]) * x;
    }
    const Eigen::Vector3d step = J.colPivHouseholderQr().solve(r);
    if (!step.allFinite()) break;
    const double p_new = p + step[2];
    if (!(p_new > 0.0)) break;
    const LinearFit trial = fit_fixed_rate(lambdas, values, p_new);
    if (!(trial.ssr <= best.ssr)) break;
    p = p_new;
    best = trial;
    L = trial.limit;
    C = trial.constant;
    if (std::abs(step[2]) <= 1e-15 * std::abs(p)) break;
  }
  return best;
}

bool constant_samples(const std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double scale = std::max({std::abs(*lo), std::abs(*hi), 1e-300});
  return (*hi - *lo) <= 1e-14 * scale;
}

struct Regression {
  double rate = 0.0;
  double log_constant = 0.0;
  bool ok = false;
};

Regression log_log(const std::vector<double>& lambdas, const std::vector<double>& values,
                   double limit) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double d = std::abs(values[i] - limit);
    if (d > 0.0 && std::isfinite(std::log(d))) {
      lx.push_back(std::log(lambdas[i]));
      ly.push_back(std::log(d));
    }
  }
  Regression r;
  if (lx.size() < 2) return r;
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) return r;
  r.rate = -sxy / sxx;
  r.log_constant = my + r.rate * mx;
  r.ok = true;
  return r;
}

double stage_one_limit(const std::vector<double>& lambdas, const std::vector<double>& values) {
  if (constant_samples(values)) return values.back();
  double p = best_rate(lambdas, values);
  return polish(lambdas, values, p).limit;
}

}  // namespace

ConvergenceFit fit_convergence(const std::vector<double>& lambdas, const std::vector<double>& values) {
  if (lambdas.size() != values.size())
    throw ValidationError("samples", "lambda and value lists differ in length");
  if (lambdas.size() < 4)
    throw InsufficientLadder("convergence fit needs at least 4 samples, got " +
                             std::to_string(lambdas.size()));
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || !std::isfinite(values[i]))
      throw ValidationError("samples", "lambda must be positive and values finite");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      throw ValidationError("samples", "lambda must be strictly increasing");
  }

  ConvergenceFit fit;
  fit.points = static_cast<int>(values.size());
  fit.lambdas = lambdas;
  fit.values = values;

  if (constant_samples(values)) {
    fit.limit = values.back();
    fit.rate = std::numeric_limits<double>::infinity();
    fit.degenerate = true;
    return fit;
  }

  double p1 = best_rate(lambdas, values);
  const LinearFit stage1 = polish(lambdas, values, p1);
  fit.limit = stage1.limit;

  const Regression stage2 = log_log(lambdas, values, fit.limit);
  if (stage2.ok) {
    fit.rate = stage2.rate;
    const double sign = stage1.constant < 0.0 ? -1.0 : 1.0;
    fit.constant = sign * std::exp(stage2.log_constant);
  } else {
    fit.rate = std::numeric_limits<double>::infinity();
    fit.degenerate = true;
  }

  double ss = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double r = values[i] - stage1.limit - stage1.constant * std::pow(lambdas[i], -p1);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / values.size());

  if (values.size() >= 4) {
    double spread = 0.0;
    for (std::size_t drop = 0; drop < values.size(); ++drop) {
      std::vector<double> lx;
      std::vector<double> vx;
      for (std::size_t i = 0; i < values.size(); ++i)
        if (i != drop) {
          lx.push_back(lambdas[i]);
          vx.push_back(values[i]);
        }
      spread = std::max(spread, std::abs(stage_one_limit(lx, vx) - fit.limit));
    }
    fit.limit_uncertainty = spread;
  }
  return fit;
}

}  // namespace cmclab
