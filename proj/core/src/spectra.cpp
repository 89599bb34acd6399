#include "cmclab/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "cmclab/errors.hpp"

namespace cmclab {

MultiCurve MultiCurve::from_model(const ModelSpec& model) {
  MultiCurve c;
  for (int k : model.wedge_indices()) {
    const Segment& s = model.segment(k);
    c.entries.push_back({s.label, s.width, s.cross_section_volume});
  }
  return c;
}

void MultiCurve::validate() const {
  if (entries.empty()) throw ValidationError("multicurve", "needs at least one curve");
  std::set<std::string> seen;
  for (const MultiCurveEntry& e : entries) {
    if (!(e.weight > 0.0)) throw ValidationError("multicurve." + e.label, "weight must be positive");
    if (!(e.volume > 0.0)) throw ValidationError("multicurve." + e.label, "volume must be positive");
    if (!seen.insert(e.label).second) throw ValidationError("multicurve." + e.label, "repeated label");
  }
}

const MultiCurveEntry& MultiCurve::entry(const std::string& label) const {
  for (const MultiCurveEntry& e : entries)
    if (e.label == label) return e;
  throw UnknownLabel("no curve labelled '" + label + "'");
}

std::map<std::string, int> CurveClass::counts() const {
  std::map<std::string, int> m;
  for (const std::string& s : crossings) ++m[s];
  return m;
}

double measure_spectrum(const MultiCurve& curve, const CurveClass& cls) {
  double total = 0.0;
  for (const auto& [label, count] : cls.counts()) total += count * curve.entry(label).weight;
  return total;
}

// ---------------------------------------------------------------------------

DualTree::DualTree(const MultiCurve& curve, const CurveClass& cls, int periods) {
  period_ = static_cast<int>(cls.crossings.size());
  const int edges = period_ * periods;
  adjacency_.resize(static_cast<std::size_t>(edges + 1));
  for (int e = 0; e < edges; ++e) {
    const double len = curve.entry(cls.crossings[static_cast<std::size_t>(e % period_)]).weight;
    lengths_.push_back(len);
    adjacency_[static_cast<std::size_t>(e)].emplace_back(e + 1, len);
    adjacency_[static_cast<std::size_t>(e + 1)].emplace_back(e, len);
  }
}

double DualTree::vertex_distance(int a, int b) const {
  // Depth-first walk of the unique path.
  std::vector<double> dist(adjacency_.size(), -1.0);
  std::vector<int> stack{a};
  dist[static_cast<std::size_t>(a)] = 0.0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (v == b) return dist[static_cast<std::size_t>(v)];
    for (const auto& [w, len] : adjacency_[static_cast<std::size_t>(v)])
      if (dist[static_cast<std::size_t>(w)] < 0.0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + len;
        stack.push_back(w);
      }
  }
  throw Error("dual tree is disconnected");
}

double DualTree::distance(int edge_a, double t_a, int edge_b, double t_b) const {
  const double la = edge_length(edge_a);
  const double lb = edge_length(edge_b);
  if (edge_a == edge_b) return std::abs(t_a - t_b) * la;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double da = (i == 0 ? t_a : 1.0 - t_a) * la;
      const double db = (j == 0 ? t_b : 1.0 - t_b) * lb;
      best = std::min(best, da + vertex_distance(edge_a + i, edge_b + j) + db);
    }
  return best;
}

TranslationLength tree_translation_length(const MultiCurve& curve, const CurveClass& cls,
                                          double resolution) {
  TranslationLength out;
  out.resolution = resolution;
  for (const std::string& s : cls.crossings) curve.entry(s);
  if (cls.crossings.empty()) {
    out.hyperbolic = false;
    return out;
  }
  const DualTree tree(curve, cls);
  const int m = tree.period();
  out.length = tree.distance(m, 0.0, 2 * m, 0.0);
  double inf = std::numeric_limits<double>::infinity();
  for (int e = m; e < 2 * m; ++e) {
    const int steps = std::max(1, static_cast<int>(std::ceil(tree.edge_length(e) / resolution)));
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      inf = std::min(inf, tree.distance(e, t, e + m, t));
    }
  }
  out.brute_force = inf;
  return out;
}

// ---------------------------------------------------------------------------

std::string ClassRealization::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::base_chain: os << "base_chain"; break;
    case Kind::word_necklace: os << "word_necklace"; break;
    case Kind::collar_winding: os << "collar_winding"; break;
  }
  if (periods != 1) os << " x" << periods;
  return os.str();
}

namespace {

std::vector<std::string> wedge_cycle(const ModelSpec& model) {
  std::vector<std::string> out;
  for (int k : model.wedge_indices()) out.push_back(model.segment(k).label);
  return out;
}

// Shortest word r with word = r^k.
std::vector<std::string> primitive_root(const std::vector<std::string>& word) {
  const std::size_t m = word.size();
  for (std::size_t len = 1; len <= m; ++len) {
    if (m % len != 0) continue;
    bool ok = true;
    for (std::size_t i = len; i < m && ok; ++i) ok = word[i] == word[i % len];
    if (ok) return {word.begin(), word.begin() + static_cast<std::ptrdiff_t>(len)};
  }
  return word;
}

bool cyclic_rotation(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t shift = 0; shift < a.size(); ++shift) {
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) ok = a[(i + shift) % a.size()] == b[i];
    if (ok) return true;
  }
  return false;
}

// Leaves of truncated single-wedge models with Neumann ends and equal outer
// collars extend by reflection to the periodic tent necklace.
bool reflects_to_necklace(const ModelSpec& model) {
  if (model.closure() != Closure::truncated || model.outer_boundary() != OuterBoundary::neumann) return false;
  if (model.segment_count() != 3 || model.wedge_indices().size() != 1) return false;
  const Segment& a = model.segment(0);
  const Segment& b = model.segment(2);
  return !a.is_wedge() && !b.is_wedge() && a.width == b.width;
}

double collar_template_width(const ModelSpec& model) {
  if (model.closure() == Closure::periodic) {
    for (const Segment& s : model.segments())
      if (!s.is_wedge()) return s.width;
    return 1.0;
  }
  const Segment& a = model.segment(0);
  const Segment& b = model.segment(model.segment_count() - 1);
  if (!a.is_wedge() && !b.is_wedge()) return a.width + b.width;
  for (const Segment& s : model.segments())
    if (!s.is_wedge()) return 2.0 * s.width;
  return 1.0;
}

}  // namespace

ClassRealization realize_class(const ModelSpec& model, const MultiCurve& curve, const CurveClass& cls) {
  if (cls.trivial()) throw ClassNotRealizable("class '" + cls.label + "' is trivial");
  for (const std::string& s : cls.crossings) curve.entry(s);
  const int n = model.dimension();
  if (cls.winding != 0 && n != 2)
    throw ClassNotRealizable("winding classes are only modelled for n = 2 (class '" + cls.label + "')");
  ClassRealization r;
  r.model = model;
  // n = 2: the cross-section is a closed geodesic of length L.
  if (cls.winding != 0) r.dx = cls.winding * model.segment(0).cross_section_volume;
  if (cls.crossings.empty()) {
    r.kind = ClassRealization::Kind::collar_winding;
    return r;
  }
  const std::vector<std::string> root = primitive_root(cls.crossings);
  const int k = static_cast<int>(cls.crossings.size() / root.size());
  const std::vector<std::string> cycle = wedge_cycle(model);
  const bool base = !cycle.empty() && cyclic_rotation(primitive_root(cycle), root) &&
                    primitive_root(cycle).size() == cycle.size() &&
                    (model.closure() == Closure::periodic || reflects_to_necklace(model));
  r.periods = k;
  if (base) {
    r.kind = ClassRealization::Kind::base_chain;
    return r;
  }
  std::vector<WedgeSpec> wedges;
  for (const std::string& s : root) {
    const MultiCurveEntry& e = curve.entry(s);
    wedges.push_back({e.label, e.weight, e.volume});
  }
  try {
    r.model = necklace_model(n, wedges, collar_template_width(model));
  } catch (const Error& e) {
    throw ClassNotRealizable("class '" + cls.label + "': " + e.what());
  }
  r.kind = ClassRealization::Kind::word_necklace;
  return r;
}

ClassLength leaf_length_spectrum(const HeightField& field, const CurveClass& cls) {
  const ModelSpec& model = *field.model;
  const ClassRealization r = realize_class(model, MultiCurve::from_model(model), cls);
  ClassLength out;
  switch (r.kind) {
    case ClassRealization::Kind::word_necklace:
      throw ClassNotRealizable("class '" + cls.label + "' does not close on this chain; solve " +
                               "the necklace from realize_class instead");
    case ClassRealization::Kind::collar_winding: {
      const LeafProfile prof(field);
      long double best = std::numeric_limits<long double>::infinity();
      bool in_wedge = false;
      for (const LeafProfile::Node& a : prof.nodes) {
        const long double len = a.cross_volume * a.B;
        if (len < best) {
          best = len;
          in_wedge = a.wedge;
        }
      }
      out.length = static_cast<double>(std::abs(cls.winding) * best);
      (in_wedge ? out.wedge_part : out.off_wedge_part) = out.length;
      return out;
    }
    case ClassRealization::Kind::base_chain: {
      const PeriodicGeodesic g = periodic_geodesic(field, r.dx / r.periods);
      out.length = r.periods * g.length;
      out.wedge_part = r.periods * g.wedge_part;
      out.off_wedge_part = r.periods * g.off_wedge_part;
      return out;
    }
  }
  return out;
}

SpectrumReport spectrum_convergence_report(const ModelSpec& model, const MultiCurve& curve,
                                           const std::vector<CurveClass>& classes,
                                           const std::vector<double>& lambdas,
                                           const SolverConfig& config, int jobs) {
  if (lambdas.size() < 4) throw InsufficientLadder("spectrum convergence needs at least four ladder points");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1])) throw ValidationError("ladder", "lambda must increase strictly");
  if (classes.size() < 3) throw ValidationError("classes", "need at least three classes");
  if (std::none_of(classes.begin(), classes.end(),
                   [](const CurveClass& c) { return c.crossings.empty() && c.winding != 0; }))
    throw ValidationError("classes", "need a pure winding class");
  curve.validate();

  // Distinct realization models, each solved once per lambda.
  std::vector<ModelSpec> models;
  std::vector<std::size_t> model_of;
  std::vector<ClassRealization> realizations;
  for (const CurveClass& c : classes) {
    realizations.push_back(realize_class(model, curve, c));
    const ModelSpec& m = realizations.back().model;
    auto it = std::find(models.begin(), models.end(), m);
    model_of.push_back(static_cast<std::size_t>(it - models.begin()));
    if (it == models.end()) models.push_back(m);
  }
  const std::size_t tasks = models.size() * lambdas.size();
  std::vector<HeightField> fields(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      try {
        const double lambda = lambdas[t % lambdas.size()];
        const ModelSpec& m = models[t / lambdas.size()];
        fields[t] = solve_cmc_leaf(m, -(m.dimension() - 1) * lambda, config);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::max(1, jobs) - 1; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SpectrumReport report;
  report.lambdas = lambdas;
  report.max_deviation.assign(lambdas.size(), 0.0);
  double min_weight = std::numeric_limits<double>::infinity();
  for (const MultiCurveEntry& e : curve.entries) min_weight = std::min(min_weight, e.weight);
  report.pass = true;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    ClassSpectrum cs;
    cs.cls = classes[c];
    cs.realization = realizations[c].describe();
    cs.s_tree = measure_spectrum(curve, classes[c]);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const ClassLength len = leaf_length_spectrum(fields[model_of[c] * lambdas.size() + i], classes[c]);
      cs.lengths.push_back(len.length);
      cs.wedge_parts.push_back(len.wedge_part);
      cs.off_wedge_parts.push_back(len.off_wedge_part);
      report.max_deviation[i] = std::max(report.max_deviation[i], std::abs(len.length - cs.s_tree));
    }
    cs.fit = fit_convergence(lambdas, cs.lengths);
    cs.tolerance = 0.01 * std::max(cs.s_tree, min_weight);
    cs.pass = std::abs(cs.fit.limit - cs.s_tree) <= cs.tolerance;
    report.pass = report.pass && cs.pass;
    report.classes.push_back(std::move(cs));
  }
  report.deviation_decreasing = true;
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    report.deviation_decreasing = report.deviation_decreasing && report.max_deviation[i] < report.max_deviation[i - 1];
  return report;
}

}  // namespace cmclab
