#pragma once

// Report files for a sweep. Output directory layout:
//
//   caveats.txt       model caveats, one "- " line each (always written)
//   solver.csv        model,lambda,tau,converged,iterations,residual,barrier_margin,min_convexity,error
//   volume.csv        lambda,vol_wedge_<label>...,vol_off,scaled_vol
//   energy.csv        lambda,tau,energy,energy_rescaled,volume,hamiltonian,scaled_energy,
//                     scaled_hamiltonian,scaled_wedge_volume,scaled_off_volume,escale_error
//   distance.csv      lambda,query,from_segment,from_xi,from_x,to_segment,to_xi,to_x,clairaut,mesh,
//                     resolution,tolerance,agree,reference,error
//   spectra.csv       lambda,class,length,wedge_part,off_wedge_part,error
//   classes.csv       class,crossings,winding,realization,s_tree,tree_length,error
//   kasner.csv        lambda,sup_deviation,sup_slope,sup_curvature
//   monotonicity.csv  tau,tau0,lower,middle,upper,lower_ok,upper_ok
//   oracle.csv        lambda,step,sup_relative_residual,order
//   flatness.csv      dimension,kind,resolution,step,sup_norm,curvature_scale,relative,points
//   fits.csv          name,limit,rate,constant,residual_rms,limit_uncertainty,points,tag
//   series/<name>.dat two columns "lambda value", one file per fitted series
//   summary.json      see schema/report.schema.json
//
// Tables of disabled diagnostics are not written. Floating-point values carry
// 17 significant digits; extended-precision values use the long double range.

#include <string>
#include <vector>

#include "cmclab/sweep.hpp"

namespace cmclab {

enum class EmitMode { csv, json, all };
EmitMode parse_emit_mode(const std::string& text);  // throws ValidationError("emit")

inline constexpr int kReportSchemaVersion = 1;

// Column names of volume.csv for the given wedge labels.
std::vector<std::string> volume_header(const std::vector<std::string>& wedge_labels);

// summary.json contents.
std::string summary_json(const SweepResult& result);

// Writes the report files; returns their paths relative to the directory in
// write order. Throws IoError.
std::vector<std::string> emit_report(const SweepResult& result, const std::string& directory,
                                     EmitMode mode = EmitMode::all);

// RFC 4180 field quoting.
std::string csv_field(const std::string& text);

}  // namespace cmclab
