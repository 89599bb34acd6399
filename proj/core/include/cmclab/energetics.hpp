#pragma once

// Energy of the Gauss map (as the integral of |K|^2), the rescaled Hamiltonian
// |tau|^n Vol and their lambda-ladder limits, plus the n = 2 area
// monotonicity inequalities.

#include <string>
#include <vector>

#include "cmclab/fit.hpp"
#include "cmclab/leaf_geometry.hpp"

namespace cmclab {

// Integral of |K|^2 over the region.
double dirichlet_energy(const HeightField& field, const Region& region = Region::all_leaf());

// Sup over samples of ||K|^2 - R - tau^2|, with R from the grid-differenced
// warped-product formula.
double gauss_identity_residual(const HeightField& field);

// |tau|^n Vol(leaf); invariant under rescaling.
double rescaled_hamiltonian(const HeightField& field);

struct VolumeBreakdown {
  std::vector<std::string> labels;  // wedge labels in chain order
  std::vector<double> wedges;
  double off_wedges = 0.0;
  double total = 0.0;
};
VolumeBreakdown volume_breakdown(const HeightField& field);

struct EnergyRow {
  double lambda = 0.0;
  double tau = 0.0;
  double energy = 0.0;           // E(M_tau)
  double energy_rescaled = 0.0;  // E(M_lambda), integrated on the rescaled field
  double volume = 0.0;
  double hamiltonian = 0.0;
  double scaled_energy = 0.0;       // lambda^{n-3} E(M_tau)
  double scaled_hamiltonian = 0.0;  // lambda^{-1} H
  double scaled_wedge_volume = 0.0; // lambda^{n-1} Vol(wedges)
  double scaled_off_volume = 0.0;   // lambda^{n-1} Vol(off wedges)
  // |E(M_lambda) - lambda^{n-2} E(M_tau)| / E(M_lambda)
  double escale_error = 0.0;
  VolumeBreakdown volumes;
};
EnergyRow energy_row(const HeightField& field);

struct EnergyReport {
  int dimension = 2;
  std::vector<EnergyRow> rows;
  ConvergenceFit energy_fit;
  ConvergenceFit hamiltonian_fit;
  ConvergenceFit wedge_volume_fit;
  ConvergenceFit off_volume_fit;
  double slab_constant = 0.0;   // sum of l_k Vol(Sigma_k)
  double energy_constant = 0.0; // (n-1) * slab constant
  // Candidates for the Hamiltonian limit: the slab constant itself and
  // (n-1)^n times it. They coincide for n = 2.
  double hamiltonian_candidate_slab = 0.0;
  double hamiltonian_candidate_volume = 0.0;
  double max_escale_error = 0.0;
};

// Fits the ladder (at least four rows with increasing lambda); throws
// InsufficientLadder.
EnergyReport asymptotic_energy_fit(const ModelSpec& model, const std::vector<EnergyRow>& rows);

struct MonotonicityRow {
  double tau = 0.0;   // tau < tau0 < 0
  double tau0 = 0.0;
  double lower = 0.0;   // A(tau0) tau0^2 / |tau|
  double middle = 0.0;  // |tau| A(tau)
  double upper = 0.0;   // |tau0| A(tau0)
  bool lower_ok = false;
  bool upper_ok = false;
};

struct MonotonicityReport {
  std::vector<MonotonicityRow> rows;
  double slack = 1e-10;  // relative
  bool pass = false;
  std::string caveat;
};

// All ordered pairs of the ladder. Needs at least three points.
MonotonicityReport area_monotonicity_check(const std::vector<double>& taus, const std::vector<double>& areas,
                                           double slack = 1e-10);
// n = 2 fields; throws BadDimension otherwise.
MonotonicityReport area_monotonicity_check(const std::vector<HeightField>& ladder, double slack = 1e-10);

}  // namespace cmclab
