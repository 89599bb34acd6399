#pragma once

// Lambda-ladder orchestration: solves every ladder point of the configured
// model (and of the models realizing each curve class), evaluates the enabled
// diagnostics and fits the ladder. Failures are recorded per point and the run
// continues.

#include <optional>
#include <string>
#include <vector>

#include "cmclab/config.hpp"
#include "cmclab/energetics.hpp"
#include "cmclab/kasner.hpp"
#include "cmclab/leaf_geometry.hpp"
#include "cmclab/oracle.hpp"
#include "cmclab/spectra.hpp"

namespace cmclab {

struct SolveRecord {
  std::string model;  // "base", or "class_<label>" for the first class a model realizes
  double lambda = 0.0;
  double tau = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  long double barrier_margin = 0;
  double min_convexity = 0.0;
  std::string error;  // empty on success
};

struct DistanceRecord {
  double lambda = 0.0;
  std::string query;  // "cross_<label>" or "random_<i>"
  LeafPoint from;
  LeafPoint to;
  DistanceCheck check;
  std::optional<double> reference;  // wedge width for crossings
  std::string error;
};

struct SpectrumRecord {
  double lambda = 0.0;
  std::string cls;
  ClassLength length;
  std::string error;
};

struct OracleRecord {
  double lambda = 0.0;
  OracleOrderStudy study;
};

struct NamedFit {
  std::string name;
  ConvergenceFit fit;
};

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ClassSummary {
  CurveClass cls;
  std::string realization;  // empty when not realizable
  double s_tree = 0.0;
  double tree_length = 0.0;  // dual-tree translation length
  std::string error;
};

struct SweepResult {
  RunConfig config;
  std::vector<double> lambdas;
  std::vector<std::string> caveats;
  std::vector<std::string> wedge_labels;
  std::vector<SolveRecord> solves;  // base model first, then realizations; each by lambda
  std::vector<EnergyRow> energy;    // converged base points only
  std::vector<DistanceRecord> distances;
  std::vector<ClassSummary> classes;
  std::vector<SpectrumRecord> spectra;
  std::optional<KasnerLimitReport> kasner;
  std::optional<MonotonicityReport> monotonicity;
  std::vector<OracleRecord> oracle;
  std::vector<FlatnessDiagnostic> flatness;
  std::vector<NamedFit> fits;
  std::vector<Check> checks;
  std::vector<std::string> notes;  // skipped sections and why

  bool all_converged() const;
  // 0, or 2 when any solve failed.
  int exit_code() const;
};

struct SweepOptions {
  int jobs = 1;
  int random_queries = 2;  // seeded distance queries per ladder point
};

// Config must be valid (load_config validates).
SweepResult run_sweep(const RunConfig& config, const SweepOptions& options = {});

}  // namespace cmclab
