#pragma once

// Convergence-rate fitting over a lambda ladder: value(lambda) ~ L + C lambda^-p.

#include <string>
#include <vector>

namespace cmclab {

struct ConvergenceFit {
  double limit = 0.0;
  double rate = 0.0;      // p; +inf when the samples are constant
  double constant = 0.0;  // C (signed)
  double residual_rms = 0.0;
  // Spread of the limit under leave-one-out refits.
  double limit_uncertainty = 0.0;
  int points = 0;
  bool degenerate = false;
  std::vector<double> lambdas;
  std::vector<double> values;

  std::string tag() const { return degenerate ? "degenerate" : "power_law"; }
};

// Two-stage fit. Stage 1 fits L + C lambda^-p by least squares (linear in L, C
// for fixed p; p by bracketed minimization); stage 2 regresses log|v - L| on
// log lambda for (C, p). Needs at least four samples with strictly increasing
// lambda; throws InsufficientLadder or ValidationError.
ConvergenceFit fit_convergence(const std::vector<double>& lambdas, const std::vector<double>& values);

}  // namespace cmclab
