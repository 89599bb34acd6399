#include "cmclab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cmclab/errors.hpp"

namespace cmclab {

std::vector<double> LadderConfig::lambdas() const {
  if (!geometric) return values;
  std::vector<double> out;
  double v = start;
  for (int i = 0; i < count; ++i) {
    out.push_back(v);
    v *= ratio;
  }
  return out;
}

void RunConfig::validate() const {
  if (schema_version != kConfigSchemaVersion)
    throw ValidationError("schema_version", "unsupported version " + std::to_string(schema_version));
  if (dimension < 2) throw ValidationError("model.dimension", "must be at least 2");
  if (segments.empty()) throw ValidationError("model.segments", "needs at least one segment");
  try {
    (void)model();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError("model.segments", e.what());
  }
  try {
    solver.validate();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError("solver", e.what());
  }
  if (ladder.geometric) {
    if (!(ladder.start > 0.0) || !std::isfinite(ladder.start)) throw ValidationError("ladder.start", "must be positive");
    if (!(ladder.ratio > 1.0) || !std::isfinite(ladder.ratio)) throw ValidationError("ladder.ratio", "must exceed 1");
    if (ladder.count < 1) throw ValidationError("ladder.count", "must be at least 1");
  } else {
    if (ladder.values.empty()) throw ValidationError("ladder.values", "needs at least one value");
    for (std::size_t i = 0; i < ladder.values.size(); ++i) {
      if (!(ladder.values[i] > 0.0) || !std::isfinite(ladder.values[i]))
        throw ValidationError("ladder.values", "must be positive");
      if (i > 0 && !(ladder.values[i] > ladder.values[i - 1]))
        throw ValidationError("ladder.values", "must increase strictly");
    }
  }
  const ModelSpec m = model();
  std::set<std::string> labels;
  for (int k : m.wedge_indices()) labels.insert(m.segment(k).label);
  std::set<std::string> class_labels;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const CurveClass& c = classes[i];
    const std::string field = "classes[" + std::to_string(i) + "]";
    if (c.label.empty()) throw ValidationError(field + ".label", "must not be empty");
    if (!class_labels.insert(c.label).second) throw ValidationError(field + ".label", "repeated label");
    if (c.trivial()) throw ValidationError(field, "class is trivial");
    for (const std::string& s : c.crossings)
      if (!labels.count(s)) throw ValidationError(field + ".crossings", "no wedge labelled '" + s + "'");
  }
  if (output_directory.empty()) throw ValidationError("output.directory", "must not be empty");
}

ModelSpec RunConfig::model() const { return build_model(dimension, segments, closure, outer_boundary); }

std::vector<CurveClass> RunConfig::effective_classes() const {
  if (!classes.empty()) return classes;
  std::vector<CurveClass> out;
  const ModelSpec m = model();
  for (int k : m.wedge_indices()) {
    const std::string& label = m.segment(k).label;
    out.push_back({"cross_" + label, {label}, 0});
  }
  if (dimension == 2) out.push_back({"winding", {}, 1});
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  const YAML::Mark m = node.Mark();
  throw ParseError(m.line + 1, m.column + 1, what);
}

void check_keys(const YAML::Node& map, const std::string& where, const std::set<std::string>& allowed) {
  if (!map.IsMap()) fail(map, "'" + where + "' must be a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, "'" + field + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "'" + field + "' has the wrong type");
  }
}

template <typename T>
void optional(const YAML::Node& map, const char* key, const std::string& where, T& out) {
  const YAML::Node n = map[key];
  if (n) out = scalar<T>(n, where + "." + key);
}

Closure parse_closure(const YAML::Node& n) {
  const std::string s = scalar<std::string>(n, "model.closure");
  if (s == "truncated") return Closure::truncated;
  if (s == "periodic") return Closure::periodic;
  fail(n, "model.closure must be 'truncated' or 'periodic'");
}

OuterBoundary parse_boundary(const YAML::Node& n) {
  const std::string s = scalar<std::string>(n, "model.outer_boundary");
  if (s == "neumann") return OuterBoundary::neumann;
  if (s == "dirichlet-cone") return OuterBoundary::dirichlet_cone;
  fail(n, "model.outer_boundary must be 'neumann' or 'dirichlet-cone'");
}

CollarProfile parse_profile(const YAML::Node& n) {
  const std::string s = scalar<std::string>(n, "profile");
  if (s == "rising") return CollarProfile::rising;
  if (s == "falling") return CollarProfile::falling;
  if (s == "tent") return CollarProfile::tent;
  fail(n, "profile must be 'rising', 'falling' or 'tent'");
}

InitialGuess parse_guess(const YAML::Node& n) {
  const std::string s = scalar<std::string>(n, "solver.initial_guess");
  if (s == "barrier_midpoint") return InitialGuess::barrier_midpoint;
  if (s == "reference_levels") return InitialGuess::reference_levels;
  fail(n, "solver.initial_guess must be 'barrier_midpoint' or 'reference_levels'");
}

Segment parse_segment(const YAML::Node& n, std::size_t index) {
  const std::string where = "model.segments[" + std::to_string(index) + "]";
  check_keys(n, where, {"kind", "label", "width", "volume", "profile"});
  for (const char* key : {"kind", "label", "width", "volume"})
    if (!n[key]) fail(n, where + " is missing '" + key + "'");
  const std::string kind = scalar<std::string>(n["kind"], where + ".kind");
  Segment s;
  s.label = scalar<std::string>(n["label"], where + ".label");
  s.width = scalar<double>(n["width"], where + ".width");
  s.cross_section_volume = scalar<double>(n["volume"], where + ".volume");
  if (kind == "wedge") {
    s.kind = SegmentKind::wedge;
    if (n["profile"]) fail(n["profile"], where + ": wedges take no profile");
  } else if (kind == "collar") {
    s.kind = SegmentKind::collar;
    if (!n["profile"]) fail(n, where + " is missing 'profile'");
    s.profile = parse_profile(n["profile"]);
  } else {
    fail(n["kind"], where + ".kind must be 'wedge' or 'collar'");
  }
  return s;
}

RunConfig from_yaml(const YAML::Node& root) {
  if (!root || !root.IsMap()) throw ParseError(1, 1, "configuration must be a mapping");
  check_keys(root, "the document",
             {"schema_version", "model", "solver", "ladder", "classes", "diagnostics", "output", "seed"});
  RunConfig c;
  if (!root["schema_version"]) throw ParseError(1, 1, "missing 'schema_version'");
  c.schema_version = scalar<int>(root["schema_version"], "schema_version");
  if (c.schema_version != kConfigSchemaVersion)
    throw ValidationError("schema_version", "unsupported version " + std::to_string(c.schema_version));

  const YAML::Node model = root["model"];
  if (!model) throw ParseError(1, 1, "missing 'model'");
  check_keys(model, "model", {"dimension", "closure", "outer_boundary", "segments"});
  optional(model, "dimension", "model", c.dimension);
  if (model["closure"]) c.closure = parse_closure(model["closure"]);
  if (model["outer_boundary"]) c.outer_boundary = parse_boundary(model["outer_boundary"]);
  const YAML::Node segs = model["segments"];
  if (!segs) fail(model, "model is missing 'segments'");
  if (!segs.IsSequence()) fail(segs, "model.segments must be a list");
  for (std::size_t i = 0; i < segs.size(); ++i) c.segments.push_back(parse_segment(segs[i], i));

  if (const YAML::Node s = root["solver"]) {
    check_keys(s, "solver",
               {"tolerance", "max_iterations", "cells_per_unit", "min_cells", "min_damping", "polish_iterations",
                "initial_guess"});
    optional(s, "tolerance", "solver", c.solver.tolerance);
    optional(s, "max_iterations", "solver", c.solver.max_iterations);
    optional(s, "cells_per_unit", "solver", c.solver.cells_per_unit);
    optional(s, "min_cells", "solver", c.solver.min_cells);
    optional(s, "min_damping", "solver", c.solver.min_damping);
    optional(s, "polish_iterations", "solver", c.solver.polish_iterations);
    if (s["initial_guess"]) c.solver.initial_guess = parse_guess(s["initial_guess"]);
  }

  if (const YAML::Node l = root["ladder"]) {
    check_keys(l, "ladder", {"start", "ratio", "count", "values"});
    if (l["values"]) {
      if (l["start"] || l["ratio"] || l["count"]) fail(l, "ladder takes either 'values' or start/ratio/count");
      if (!l["values"].IsSequence()) fail(l["values"], "ladder.values must be a list");
      c.ladder.geometric = false;
      for (const YAML::Node& v : l["values"]) c.ladder.values.push_back(scalar<double>(v, "ladder.values"));
    } else {
      optional(l, "start", "ladder", c.ladder.start);
      optional(l, "ratio", "ladder", c.ladder.ratio);
      optional(l, "count", "ladder", c.ladder.count);
    }
  }

  if (const YAML::Node cls = root["classes"]) {
    if (!cls.IsSequence()) fail(cls, "classes must be a list");
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const YAML::Node e = cls[i];
      const std::string where = "classes[" + std::to_string(i) + "]";
      check_keys(e, where, {"label", "crossings", "winding"});
      CurveClass k;
      if (!e["label"]) fail(e, where + " is missing 'label'");
      k.label = scalar<std::string>(e["label"], where + ".label");
      if (const YAML::Node w = e["crossings"]) {
        if (!w.IsSequence()) fail(w, where + ".crossings must be a list of wedge labels");
        for (const YAML::Node& s : w) k.crossings.push_back(scalar<std::string>(s, where + ".crossings"));
      }
      optional(e, "winding", where, k.winding);
      c.classes.push_back(k);
    }
  }

  if (const YAML::Node d = root["diagnostics"]) {
    check_keys(d, "diagnostics", {"oracle", "flatness", "monotonicity", "distance", "spectra", "energy", "kasner"});
    optional(d, "oracle", "diagnostics", c.diagnostics.oracle);
    optional(d, "flatness", "diagnostics", c.diagnostics.flatness);
    optional(d, "monotonicity", "diagnostics", c.diagnostics.monotonicity);
    optional(d, "distance", "diagnostics", c.diagnostics.distance);
    optional(d, "spectra", "diagnostics", c.diagnostics.spectra);
    optional(d, "energy", "diagnostics", c.diagnostics.energy);
    optional(d, "kasner", "diagnostics", c.diagnostics.kasner);
  }
  if (const YAML::Node o = root["output"]) {
    check_keys(o, "output", {"directory"});
    optional(o, "directory", "output", c.output_directory);
  }
  optional(root, "seed", "", c.seed);
  c.validate();
  return c;
}

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.mark.line + 1, e.mark.column + 1, e.msg);
  }
  return from_yaml(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read configuration '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c, bool include_output) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << c.schema_version;
  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dimension" << YAML::Value << c.dimension;
  out << YAML::Key << "closure" << YAML::Value << to_string(c.closure);
  out << YAML::Key << "outer_boundary" << YAML::Value << to_string(c.outer_boundary);
  out << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
  for (const Segment& s : c.segments) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << to_string(s.kind);
    out << YAML::Key << "label" << YAML::Value << s.label;
    out << YAML::Key << "width" << YAML::Value << number(s.width);
    out << YAML::Key << "volume" << YAML::Value << number(s.cross_section_volume);
    if (!s.is_wedge()) out << YAML::Key << "profile" << YAML::Value << to_string(s.profile);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tolerance" << YAML::Value << number(c.solver.tolerance);
  out << YAML::Key << "max_iterations" << YAML::Value << c.solver.max_iterations;
  out << YAML::Key << "cells_per_unit" << YAML::Value << number(c.solver.cells_per_unit);
  out << YAML::Key << "min_cells" << YAML::Value << c.solver.min_cells;
  out << YAML::Key << "min_damping" << YAML::Value << number(c.solver.min_damping);
  out << YAML::Key << "polish_iterations" << YAML::Value << c.solver.polish_iterations;
  out << YAML::Key << "initial_guess" << YAML::Value << to_string(c.solver.initial_guess);
  out << YAML::EndMap;

  out << YAML::Key << "ladder" << YAML::Value << YAML::BeginMap;
  if (c.ladder.geometric) {
    out << YAML::Key << "start" << YAML::Value << number(c.ladder.start);
    out << YAML::Key << "ratio" << YAML::Value << number(c.ladder.ratio);
    out << YAML::Key << "count" << YAML::Value << c.ladder.count;
  } else {
    out << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double v : c.ladder.values) out << number(v);
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "classes" << YAML::Value << YAML::BeginSeq;
  for (const CurveClass& k : c.classes) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "label" << YAML::Value << k.label;
    out << YAML::Key << "crossings" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const std::string& s : k.crossings) out << s;
    out << YAML::EndSeq;
    out << YAML::Key << "winding" << YAML::Value << k.winding;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const DiagnosticsConfig& d = c.diagnostics;
  out << YAML::Key << "diagnostics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "oracle" << YAML::Value << d.oracle;
  out << YAML::Key << "flatness" << YAML::Value << d.flatness;
  out << YAML::Key << "monotonicity" << YAML::Value << d.monotonicity;
  out << YAML::Key << "distance" << YAML::Value << d.distance;
  out << YAML::Key << "spectra" << YAML::Value << d.spectra;
  out << YAML::Key << "energy" << YAML::Value << d.energy;
  out << YAML::Key << "kasner" << YAML::Value << d.kasner;
  out << YAML::EndMap;

  if (include_output) {
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "directory" << YAML::Value << c.output_directory;
    out << YAML::EndMap;
  }
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

LadderConfig parse_ladder_spec(const std::string& spec) {
  LadderConfig l;
  std::stringstream ss(spec);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) || a.empty() || b.empty() ||
      c.empty())
    throw ValidationError("ladder", "expected start:ratio:count, got '" + spec + "'");
  try {
    std::size_t pa = 0, pb = 0, pc = 0;
    l.start = std::stod(a, &pa);
    l.ratio = std::stod(b, &pb);
    l.count = std::stoi(c, &pc);
    if (pa != a.size() || pb != b.size() || pc != c.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ValidationError("ladder", "expected start:ratio:count, got '" + spec + "'");
  }
  if (!(l.start > 0.0)) throw ValidationError("ladder.start", "must be positive");
  if (!(l.ratio > 1.0)) throw ValidationError("ladder.ratio", "must exceed 1");
  if (l.count < 1) throw ValidationError("ladder.count", "must be at least 1");
  return l;
}

}  // namespace cmclab
