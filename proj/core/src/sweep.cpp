#include "cmclab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "cmclab/errors.hpp"
#include "cmclab/oracle.hpp"

namespace cmclab {

bool SweepResult::all_converged() const {
  return std::all_of(solves.begin(), solves.end(), [](const SolveRecord& s) { return s.converged; });
}

int SweepResult::exit_code() const { return all_converged() ? 0 : 2; }

namespace {

// Runs f(0) .. f(count - 1) on up to jobs threads. f must not throw.
template <typename F>
void parallel_for(std::size_t count, int jobs, F&& f) {
  if (count == 0) return;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) f(i);
  };
  std::vector<std::thread> pool;
  const std::size_t extra = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs))) - 1;
  for (std::size_t j = 0; j < extra; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
}

struct Task {
  std::size_t model = 0;
  std::size_t point = 0;
};

struct TaskOutput {
  SolveRecord record;
  std::optional<HeightField> field;
  std::optional<EnergyRow> energy;
  std::vector<DistanceRecord> distances;
  std::optional<OracleRecord> oracle;
};

std::vector<DistanceRecord> distance_queries(const HeightField& field, std::uint64_t seed, int random_queries) {
  std::vector<DistanceRecord> out;
  const ModelSpec& m = *field.model;
  const std::vector<int> wedges = m.wedge_indices();
  auto run = [&](DistanceRecord r) {
    r.lambda = field.lambda;
    try {
      r.check = compare_distance_methods(field, r.from, r.to);
    } catch (const Error& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  };
  for (int k : wedges) {
    DistanceRecord r;
    r.query = "cross_" + m.segment(k).label;
    r.from = {k, 0.0, 0.0};
    r.to = {k, m.segment(k).width, 0.0};
    r.reference = m.segment(k).width;
    run(std::move(r));
  }
  if (wedges.empty()) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int q = 0; q < random_queries; ++q) {
    const int k = wedges[static_cast<std::size_t>(rng() % wedges.size())];
    const double w = m.segment(k).width;
    DistanceRecord r;
    r.query = "random_" + std::to_string(q);
    r.from = {k, 0.5 * w * unit(rng), 0.0};
    r.to = {k, 0.5 * w * (1.0 + unit(rng)), unit(rng)};
    run(std::move(r));
  }
  return out;
}

void add_fit(SweepResult& r, const std::string& name, const std::vector<double>& lambdas,
             const std::vector<double>& values) {
  try {
    r.fits.push_back({name, fit_convergence(lambdas, values)});
  } catch (const Error& e) {
    r.notes.push_back("fit " + name + " skipped: " + e.what());
  }
}

const ConvergenceFit* find_fit(const SweepResult& r, const std::string& name) {
  for (const NamedFit& f : r.fits)
    if (f.name == name) return &f.fit;
  return nullptr;
}

}  // namespace

SweepResult run_sweep(const RunConfig& config, const SweepOptions& options) {
  config.validate();
  SweepResult result;
  result.config = config;
  result.lambdas = config.ladder.lambdas();
  const ModelSpec base = config.model();
  const int n = base.dimension();
  result.caveats = base.caveats();
  for (int k : base.wedge_indices()) result.wedge_labels.push_back(base.segment(k).label);
  const DiagnosticsConfig& diag = config.diagnostics;

  // Models to solve: the base model, then each distinct realization model.
  std::vector<ModelSpec> models{base};
  std::vector<std::string> model_names{"base"};
  std::vector<std::optional<std::size_t>> class_model;
  const std::vector<CurveClass> classes = config.effective_classes();
  const MultiCurve curve = MultiCurve::from_model(base);
  if (diag.spectra) {
    for (const CurveClass& c : classes) {
      ClassSummary s;
      s.cls = c;
      std::optional<std::size_t> index;
      try {
        s.s_tree = measure_spectrum(curve, c);
        s.tree_length = tree_translation_length(curve, c).length;
        const ClassRealization real = realize_class(base, curve, c);
        s.realization = real.describe();
        auto it = std::find(models.begin(), models.end(), real.model);
        index = static_cast<std::size_t>(it - models.begin());
        if (it == models.end()) {
          models.push_back(real.model);
          model_names.push_back("class_" + c.label);
        }
      } catch (const Error& e) {
        s.error = e.what();
      }
      class_model.push_back(index);
      result.classes.push_back(std::move(s));
    }
    if (base.closure() == Closure::truncated)
      result.caveats.push_back(
          "classes not carried by the truncated chain are measured on periodic necklace models built "
          "from their crossing words");
  }

  const std::size_t points = result.lambdas.size();
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < models.size(); ++m)
    for (std::size_t i = 0; i < points; ++i) tasks.push_back({m, i});
  std::vector<TaskOutput> outputs(tasks.size());

  parallel_for(tasks.size(), options.jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    const ModelSpec& model = models[task.model];
    TaskOutput& out = outputs[t];
    SolveRecord& rec = out.record;
    rec.model = model_names[task.model];
    rec.lambda = result.lambdas[task.point];
    rec.tau = -(n - 1) * rec.lambda;
    try {
      HeightField f = solve_cmc_leaf(model, rec.tau, config.solver);
      rec.converged = f.converged;
      rec.iterations = f.iterations;
      rec.residual = f.residual_norm;
      rec.barrier_margin = barrier_margin(f);
      rec.min_convexity = min_embedded_convexity(f);
      out.field = std::move(f);
    } catch (const NoConvergence& e) {
      rec.error = e.what();
      rec.iterations = e.partial().iterations;
      rec.residual = e.partial().residual_norm;
    } catch (const Error& e) {
      rec.error = e.what();
    }
    if (!out.field || task.model != 0) return;
    const HeightField& f = *out.field;
    try {
      out.energy = energy_row(f);
    } catch (const Error& e) {
      rec.error = std::string("energy: ") + e.what();
    }
    if (diag.distance)
      out.distances = distance_queries(f, config.seed + task.point, options.random_queries);
    if (diag.oracle) {
      try {
        out.oracle = OracleRecord{rec.lambda, oracle_order_study(f, interior_nodes(f, 7), 2e-2, 3)};
      } catch (const Error& e) {
        rec.error = std::string("oracle: ") + e.what();
      }
    }
  });

  // Merge in task order, which is (model, lambda) order.
  std::vector<const HeightField*> base_fields;
  std::vector<double> base_lambdas;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    TaskOutput& out = outputs[t];
    result.solves.push_back(out.record);
    if (tasks[t].model != 0) continue;
    if (out.field) {
      base_fields.push_back(&*out.field);
      base_lambdas.push_back(out.record.lambda);
    }
    if (out.energy) result.energy.push_back(*out.energy);
    for (DistanceRecord& d : out.distances) result.distances.push_back(std::move(d));
    if (out.oracle) result.oracle.push_back(*out.oracle);
  }
  if (!result.all_converged()) result.notes.push_back("some ladder points did not converge; see solver table");

  // Spectra per class and lambda.
  if (diag.spectra) {
    for (std::size_t c = 0; c < result.classes.size(); ++c) {
      const ClassSummary& s = result.classes[c];
      if (!class_model[c]) continue;
      std::vector<double> lambdas, lengths;
      for (std::size_t i = 0; i < points; ++i) {
        const TaskOutput& out = outputs[*class_model[c] * points + i];
        SpectrumRecord rec;
        rec.lambda = result.lambdas[i];
        rec.cls = s.cls.label;
        if (!out.field) {
          rec.error = "no converged leaf";
        } else {
          try {
            rec.length = leaf_length_spectrum(*out.field, s.cls);
            lambdas.push_back(rec.lambda);
            lengths.push_back(rec.length.length);
          } catch (const Error& e) {
            rec.error = e.what();
          }
        }
        result.spectra.push_back(rec);
      }
      add_fit(result, "spectrum_" + s.cls.label, lambdas, lengths);
    }
  }

  // Volume and energy fits.
  {
    std::vector<double> lambdas, wedge, off, energy, ham;
    for (const EnergyRow& r : result.energy) {
      lambdas.push_back(r.lambda);
      wedge.push_back(r.scaled_wedge_volume);
      off.push_back(r.scaled_off_volume);
      energy.push_back(r.scaled_energy);
      ham.push_back(r.scaled_hamiltonian);
    }
    if (!result.wedge_labels.empty()) {
      add_fit(result, "scaled_wedge_volume", lambdas, wedge);
      add_fit(result, "scaled_off_volume", lambdas, off);
    }
    if (diag.energy) {
      add_fit(result, "scaled_energy", lambdas, energy);
      add_fit(result, "scaled_hamiltonian", lambdas, ham);
    }
  }

  if (diag.distance) {
    for (const std::string& label : result.wedge_labels) {
      std::vector<double> lambdas, deficit;
      for (const DistanceRecord& d : result.distances)
        if (d.query == "cross_" + label && d.error.empty()) {
          lambdas.push_back(d.lambda);
          deficit.push_back(std::abs(d.check.clairaut - *d.reference));
        }
      add_fit(result, "crossing_deficit_" + label, lambdas, deficit);
    }
  }

  std::vector<HeightField> converged;
  for (const HeightField* f : base_fields) converged.push_back(*f);
  if (diag.kasner) {
    if (result.wedge_labels.empty()) {
      result.notes.push_back("kasner section skipped: model has no wedge");
    } else {
      try {
        result.kasner = kasner_limit_check(converged);
      } catch (const Error& e) {
        result.notes.push_back(std::string("kasner section skipped: ") + e.what());
      }
    }
  }
  if (diag.monotonicity) {
    if (n != 2) {
      result.notes.push_back("monotonicity section skipped: the area inequalities are stated for n = 2");
    } else {
      try {
        result.monotonicity = area_monotonicity_check(converged);
        result.caveats.push_back(result.monotonicity->caveat);
      } catch (const Error& e) {
        result.notes.push_back(std::string("monotonicity section skipped: ") + e.what());
      }
    }
  }
  if (diag.flatness) {
    const std::vector<int> res = n >= 4 ? std::vector<int>{17, 25} : std::vector<int>{17, 33};
    for (int r : res) {
      try {
        result.flatness.push_back(conformal_flatness_diagnostic(n, r));
      } catch (const Error& e) {
        result.notes.push_back(std::string("flatness diagnostic skipped: ") + e.what());
      }
    }
  }

  // Checks.
  auto check = [&](std::string name, bool pass, double value, double tolerance, std::string detail = {}) {
    result.checks.push_back({std::move(name), pass, value, tolerance, std::move(detail)});
  };
  {
    const double solved = static_cast<double>(
        std::count_if(result.solves.begin(), result.solves.end(), [](const SolveRecord& s) { return s.converged; }));
    check("solver.converged", result.all_converged(), solved, static_cast<double>(result.solves.size()),
          "converged solves out of total");
  }
  if (barrier_is_strict(base)) {
    long double worst = std::numeric_limits<long double>::infinity();
    bool ok = !base_fields.empty();
    for (const SolveRecord& s : result.solves)
      if (s.model == "base" && s.converged) {
        worst = std::min(worst, s.barrier_margin);
        ok = ok && s.barrier_margin > 0;
      }
    check("barrier.strict", ok, static_cast<double>(std::log10(worst)), 0.0,
          "log10 of the smallest barrier margin (rescaled units)");
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    for (const SolveRecord& s : result.solves)
      if (s.converged) worst = std::min(worst, s.min_convexity);
    const double tol = -10.0 * config.solver.tolerance;
    check("convexity", worst >= tol, worst, tol, "smallest embedded-height convexity");
  }
  double slab = 0.0;
  for (int k : base.wedge_indices()) slab += base.segment(k).width * base.segment(k).cross_section_volume;
  if (const ConvergenceFit* f = find_fit(result, "scaled_wedge_volume"))
    check("volume.wedge_limit", std::abs(f->limit - slab) <= 5e-3 * slab, f->limit, 5e-3 * slab,
          "fitted limit against the slab constant");
  if (const ConvergenceFit* f = find_fit(result, "scaled_off_volume"))
    check("volume.off_wedge_decay", f->rate > 0.0, f->rate, 0.0, "fitted decay exponent");
  if (const ConvergenceFit* f = find_fit(result, "scaled_energy")) {
    const double target = (n - 1) * slab;
    check("energy.limit", std::abs(f->limit - target) <= 1e-2 * target, f->limit, 1e-2 * target,
          "fitted limit against (n-1) times the slab constant");
  }
  if (const ConvergenceFit* f = find_fit(result, "scaled_hamiltonian")) {
    if (n == 2)
      check("hamiltonian.limit", std::abs(f->limit - slab) <= 1e-2 * slab, f->limit, 1e-2 * slab,
            "fitted limit against the slab constant");
    else
      check("hamiltonian.finite_limit", std::isfinite(f->limit) && f->rate > 0.0, f->rate, 0.0,
            "finite limit with positive rate; candidates reported in the energy section");
  }
  if (diag.distance) {
    std::size_t agree = 0, total = 0;
    for (const DistanceRecord& d : result.distances) {
      ++total;
      agree += d.error.empty() && d.check.agree;
    }
    check("distance.methods_agree", agree == total, static_cast<double>(agree), static_cast<double>(total),
          "queries where Clairaut and mesh agree");
  }
  if (diag.spectra) {
    double min_weight = std::numeric_limits<double>::infinity();
    for (const MultiCurveEntry& e : curve.entries) min_weight = std::min(min_weight, e.weight);
    for (const ClassSummary& s : result.classes) {
      check("spectrum.tree_equals_measure." + s.cls.label, s.tree_length == s.s_tree, s.tree_length, 0.0);
      if (const ConvergenceFit* f = find_fit(result, "spectrum_" + s.cls.label)) {
        const double tol = 0.01 * std::max(s.s_tree, min_weight);
        check("spectrum.limit." + s.cls.label, std::abs(f->limit - s.s_tree) <= tol, f->limit, tol,
              "fitted length against the dual-tree translation length");
      }
    }
  }
  if (result.kasner) {
    const KasnerLimitReport& k = *result.kasner;
    const double last = static_cast<double>(k.sup_deviation.back());
    check("kasner.decreasing", k.deviation_decreasing && k.slope_decreasing && k.curvature_decreasing, last, 0.0,
          "sup deviations strictly decreasing along the ladder");
    check("kasner.final", last < 1e-2, last, 1e-2, "sup |u_lambda - 1| at the top of the ladder");
  }
  if (result.monotonicity)
    check("monotonicity", result.monotonicity->pass, static_cast<double>(result.monotonicity->rows.size()),
          result.monotonicity->slack, "pairwise area inequalities");
  if (!result.oracle.empty()) {
    const double order = result.oracle.front().study.measured_order;
    check("oracle.order", std::abs(order - 2.0) <= 0.2, order, 0.2, "measured order at the bottom of the ladder");
  }
  if (result.flatness.size() >= 2 && n == 3) {
    const bool dec = result.flatness.back().relative < result.flatness.front().relative;
    check("flatness.cotton_decreasing", dec, result.flatness.back().relative, 0.0);
  }
  return result;
}

}  // namespace cmclab
