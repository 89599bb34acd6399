#include "cmclab/energetics.hpp"

#include <algorithm>
#include <cmath>

#include "cmclab/errors.hpp"

namespace cmclab {

double dirichlet_energy(const HeightField& field, const Region& region) {
  // |K|^2 folded into the cross-section factor of the volume density.
  LeafProfile weighted(field);
  for (LeafProfile::Node& a : weighted.nodes) a.cross_volume *= a.Ksq;
  return leaf_volume(weighted, region);
}

double gauss_identity_residual(const HeightField& field) {
  double sup = 0.0;
  const double t2 = field.tau * field.tau;
  for (const LeafSample& s : leaf_samples(field)) sup = std::max(sup, std::abs(s.Ksq - s.R - t2));
  return sup;
}

double rescaled_hamiltonian(const HeightField& field) {
  return std::pow(std::abs(field.tau), field.dimension()) * leaf_volume(field, Region::all_leaf());
}

VolumeBreakdown volume_breakdown(const HeightField& field) {
  VolumeBreakdown v;
  const LeafProfile prof(field);
  for (int k : field.model->wedge_indices()) {
    v.labels.push_back(field.model->segment(k).label);
    v.wedges.push_back(leaf_volume(prof, Region::whole_wedge(k)));
  }
  v.off_wedges = leaf_volume(prof, Region::off_wedges());
  v.total = v.off_wedges;
  for (double w : v.wedges) v.total += w;
  return v;
}

EnergyRow energy_row(const HeightField& field) {
  const int n = field.dimension();
  EnergyRow r;
  r.lambda = field.lambda;
  r.tau = field.tau;
  r.energy = dirichlet_energy(field);
  r.energy_rescaled = dirichlet_energy(field.rescale());
  r.volumes = volume_breakdown(field);
  r.volume = r.volumes.total;
  r.hamiltonian = std::pow(std::abs(field.tau), n) * r.volume;
  r.scaled_energy = std::pow(r.lambda, n - 3) * r.energy;
  r.scaled_hamiltonian = r.hamiltonian / r.lambda;
  double wedges = 0.0;
  for (double w : r.volumes.wedges) wedges += w;
  r.scaled_wedge_volume = std::pow(r.lambda, n - 1) * wedges;
  r.scaled_off_volume = std::pow(r.lambda, n - 1) * r.volumes.off_wedges;
  const double predicted = std::pow(r.lambda, n - 2) * r.energy;
  r.escale_error = r.energy_rescaled > 0.0 ? std::abs(r.energy_rescaled - predicted) / r.energy_rescaled : 0.0;
  return r;
}

EnergyReport asymptotic_energy_fit(const ModelSpec& model, const std::vector<EnergyRow>& rows) {
  if (rows.size() < 4) throw InsufficientLadder("energy fit needs at least four ladder points");
  EnergyReport rep;
  rep.dimension = model.dimension();
  rep.rows = rows;
  const int n = model.dimension();
  for (int k : model.wedge_indices()) rep.slab_constant += model.segment(k).width * model.segment(k).cross_section_volume;
  rep.energy_constant = (n - 1) * rep.slab_constant;
  rep.hamiltonian_candidate_slab = rep.slab_constant;
  rep.hamiltonian_candidate_volume = std::pow(n - 1, n) * rep.slab_constant;
  std::vector<double> lambdas, e, h, wv, ov;
  for (const EnergyRow& r : rows) {
    lambdas.push_back(r.lambda);
    e.push_back(r.scaled_energy);
    h.push_back(r.scaled_hamiltonian);
    wv.push_back(r.scaled_wedge_volume);
    ov.push_back(r.scaled_off_volume);
    rep.max_escale_error = std::max(rep.max_escale_error, r.escale_error);
  }
  rep.energy_fit = fit_convergence(lambdas, e);
  rep.hamiltonian_fit = fit_convergence(lambdas, h);
  rep.wedge_volume_fit = fit_convergence(lambdas, wv);
  rep.off_volume_fit = fit_convergence(lambdas, ov);
  return rep;
}

MonotonicityReport area_monotonicity_check(const std::vector<double>& taus, const std::vector<double>& areas,
                                           double slack) {
  if (taus.size() != areas.size()) throw ValidationError("areas", "one area per tau");
  if (taus.size() < 3) throw InsufficientLadder("monotonicity check needs at least three ladder points");
  MonotonicityReport rep;
  rep.slack = slack;
  rep.caveat =
      "areas are those of the modeled region of a truncated chain, not of a closed leaf; the inequalities "
      "are checked on that region only";
  rep.pass = true;
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < taus.size(); ++j) {
      if (!(taus[i] < taus[j])) continue;
      if (!(taus[j] < 0.0)) throw NonNegativeTau("mean curvature must be negative");
      MonotonicityRow r;
      r.tau = taus[i];
      r.tau0 = taus[j];
      r.lower = areas[j] * taus[j] * taus[j] / std::abs(taus[i]);
      r.middle = std::abs(taus[i]) * areas[i];
      r.upper = std::abs(taus[j]) * areas[j];
      r.lower_ok = r.lower <= r.middle * (1.0 + slack);
      r.upper_ok = r.middle <= r.upper * (1.0 + slack);
      rep.pass = rep.pass && r.lower_ok && r.upper_ok;
      rep.rows.push_back(r);
    }
  std::sort(rep.rows.begin(), rep.rows.end(), [](const MonotonicityRow& a, const MonotonicityRow& b) {
    return a.tau0 != b.tau0 ? a.tau0 > b.tau0 : a.tau > b.tau;
  });
  return rep;
}

MonotonicityReport area_monotonicity_check(const std::vector<HeightField>& ladder, double slack) {
  std::vector<double> taus, areas;
  for (const HeightField& f : ladder) {
    if (f.dimension() != 2) throw BadDimension("area monotonicity is an n = 2 statement");
    taus.push_back(f.tau);
    areas.push_back(leaf_volume(f, Region::all_leaf()));
  }
  return area_monotonicity_check(taus, areas, slack);
}

}  // namespace cmclab
