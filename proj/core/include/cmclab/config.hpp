#pragma once

// Run configuration: a versioned YAML document.
//
//   schema_version: 1
//   model:
//     dimension: 2
//     closure: truncated            # truncated | periodic
//     outer_boundary: neumann       # neumann | dirichlet-cone
//     segments:
//       - {kind: collar, label: C-, width: 3, volume: 2, profile: falling}
//       - {kind: wedge, label: S1, width: 1, volume: 2}
//       - {kind: collar, label: C+, width: 3, volume: 2, profile: rising}
//   solver: {tolerance: 1e-10, max_iterations: 50, cells_per_unit: 20, min_cells: 16,
//            min_damping: 0.0009765625, polish_iterations: 24, initial_guess: barrier_midpoint}
//   ladder: {start: 10, ratio: 10, count: 4}   # or {values: [10, 100, 1000]}
//   classes:
//     - {label: single, crossings: [S1], winding: 0}
//   diagnostics: {oracle: true, flatness: true, monotonicity: true, distance: true,
//                 spectra: true, energy: true, kasner: true}
//   output: {directory: cmclab-out}
//   seed: 0
//
// Everything except schema_version and model.segments has a default. With no
// classes the sweep uses one single-crossing class per wedge plus, for n = 2,
// the pure winding class.

#include <cstdint>
#include <string>
#include <vector>

#include "cmclab/model.hpp"
#include "cmclab/solver.hpp"
#include "cmclab/spectra.hpp"

namespace cmclab {

inline constexpr int kConfigSchemaVersion = 1;

struct LadderConfig {
  bool geometric = true;
  double start = 10.0;
  double ratio = 10.0;
  int count = 4;
  std::vector<double> values;  // used when geometric is false

  std::vector<double> lambdas() const;
  // Compares only the active representation.
  friend bool operator==(const LadderConfig& a, const LadderConfig& b) {
    if (a.geometric != b.geometric) return false;
    return a.geometric ? a.start == b.start && a.ratio == b.ratio && a.count == b.count : a.values == b.values;
  }
};

struct DiagnosticsConfig {
  bool oracle = true;
  bool flatness = true;
  bool monotonicity = true;
  bool distance = true;
  bool spectra = true;
  bool energy = true;
  bool kasner = true;
  friend bool operator==(const DiagnosticsConfig&, const DiagnosticsConfig&) = default;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  int dimension = 2;
  Closure closure = Closure::truncated;
  OuterBoundary outer_boundary = OuterBoundary::neumann;
  std::vector<Segment> segments;
  SolverConfig solver;
  LadderConfig ladder;
  std::vector<CurveClass> classes;
  DiagnosticsConfig diagnostics;
  std::string output_directory = "cmclab-out";
  std::uint64_t seed = 0;

  // Throws ValidationError naming the offending field.
  void validate() const;
  ModelSpec model() const;
  // Configured classes, or the defaults described above.
  std::vector<CurveClass> effective_classes() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws ParseError (syntax, wrong types, unknown keys; with line and column),
// ValidationError or IoError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);
// YAML text that parses back to an identical RunConfig. Without the output
// section the text depends only on what determines the results.
std::string serialize_config(const RunConfig& config, bool include_output = true);

// "start:ratio:count"; throws ValidationError("ladder").
LadderConfig parse_ladder_spec(const std::string& spec);

}  // namespace cmclab
