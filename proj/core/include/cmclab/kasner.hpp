#pragma once

// Blow-up limit inside a wedge: the rescaled heights u_lambda tend to the
// Kasner slice u = 1 uniformly in C^2 on compact subsets of the wedge.

#include <vector>

#include "cmclab/fit.hpp"
#include "cmclab/solver.hpp"

namespace cmclab {

struct KasnerLimitOptions {
  int wedge = -1;  // segment index; -1 picks the first wedge
  // Compact set as fractions of the wedge width (default: middle half).
  double compact_begin = 0.25;
  double compact_end = 0.75;
  // Interior margins for the derivative bound, as fractions of the width.
  std::vector<double> epsilons{0.1, 0.2};
};

struct DerivativeBound {
  double epsilon = 0.0;  // absolute, in tau units of the chain coordinate
  std::vector<double> scaled_slope;  // lambda * epsilon * sup |d u_tau / dr| per lambda
  double constant = 0.0;             // max over the ladder
};

struct KasnerLimitReport {
  std::vector<double> lambdas;
  // Sup norms on the compact set of |u_lambda - 1|, |u_lambda'|, |u_lambda''|
  // (rescaled derivatives). Extended precision: they decay like
  // exp(-sqrt(n-1) lambda dist).
  std::vector<long double> sup_deviation;
  std::vector<long double> sup_slope;
  std::vector<long double> sup_curvature;
  bool deviation_decreasing = false;
  bool slope_decreasing = false;
  bool curvature_decreasing = false;
  // Power-law fits of the three sequences (zeros excluded from the log fit).
  ConvergenceFit deviation_fit;
  ConvergenceFit slope_fit;
  ConvergenceFit curvature_fit;
  // Least-squares slope of -log(sup |u_lambda - 1|) against lambda; the
  // linearized equation predicts sqrt(n-1) times the distance from the
  // compact set to the wedge ends.
  double exponential_rate = 0.0;
  double predicted_exponential_rate = 0.0;
  std::vector<DerivativeBound> derivative_bounds;
  // Bound from the convexity lemma, 1/(n-1).
  double derivative_bound_theory = 0.0;
};

// Needs at least four converged fields of one model with increasing lambda;
// throws InsufficientLadder otherwise.
KasnerLimitReport kasner_limit_check(const std::vector<HeightField>& ladder,
                                     const KasnerLimitOptions& options = {});

// True when every entry is strictly below its predecessor.
bool strictly_decreasing(const std::vector<long double>& values);

}  // namespace cmclab
