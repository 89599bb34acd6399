#pragma once

// Independent check of the reduced mean-curvature operator: the leaf is
// embedded in flat R^{n,1} and its mean curvature computed from centered
// finite differences of the embedding, with no use of the reduced formulas.
//
// Embedding (x are coordinates of the graph chart q(x) = (sqrt(1+|x|^2), x) of
// the hyperboloid H^{n-1} in R^{n-1,1}):
//   wedge   X = (u q(x), xi)
//   collar  X = (u cosh(s) q(x), u sinh(s))
// The height is the quadratic jet of the field at the sample.

#include <vector>

#include "cmclab/solver.hpp"

namespace cmclab {

struct OracleOptions {
  double step = 1e-2;  // finite-difference step in rescaled units
  // Richardson levels on top of the base step (each level halves the step and
  // cancels one more even power).
  int richardson_levels = 0;
};

struct OracleSample {
  int node = 0;
  double xi = 0.0;  // global chain coordinate
  double mean_curvature = 0.0;     // finite-difference H in tau units
  double residual = 0.0;           // |H_fd - tau|
  double relative_residual = 0.0;  // |H_fd - tau| / |tau|
};

// Throws StepTooLarge when the differenced metric is not positive definite.
std::vector<OracleSample> fd_mean_curvature_oracle(const HeightField& field,
                                                   const std::vector<int>& nodes,
                                                   const OracleOptions& options = {});

// Every stride-th node, skipping the outer ends of truncated chains.
std::vector<int> interior_nodes(const HeightField& field, int stride);

struct OracleOrderStudy {
  std::vector<double> steps;
  std::vector<double> sup_relative_residual;
  std::vector<double> orders;  // log2 ratios of consecutive residuals
  double measured_order = 0.0; // last ratio
};

// Sup residual at step, step/2, ... (levels values) without Richardson.
OracleOrderStudy oracle_order_study(const HeightField& field, const std::vector<int>& nodes,
                                    double step, int levels);

}  // namespace cmclab
