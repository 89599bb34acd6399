#include "cmclab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cmclab/errors.hpp"

namespace cmclab {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

EmitMode parse_emit_mode(const std::string& text) {
  if (text == "csv") return EmitMode::csv;
  if (text == "json") return EmitMode::json;
  if (text == "all") return EmitMode::all;
  throw ValidationError("emit", "expected csv, json or all, got '" + text + "'");
}

std::vector<std::string> volume_header(const std::vector<std::string>& wedge_labels) {
  std::vector<std::string> h{"lambda"};
  for (const std::string& l : wedge_labels) h.push_back("vol_wedge_" + l);
  h.push_back("vol_off");
  h.push_back("scaled_vol");
  return h;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(long double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  return buf;
}

std::string flag(bool b) { return b ? "true" : "false"; }

class Table {
 public:
  explicit Table(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text_ += ',';
      text_ += csv_field(fields[i]);
    }
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// Non-finite values become null; the fit tag says why.
ordered_json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json fit_json(const std::string& name, const ConvergenceFit& f) {
  ordered_json j;
  j["name"] = name;
  j["limit"] = jnum(f.limit);
  j["rate"] = jnum(f.rate);
  j["constant"] = jnum(f.constant);
  j["residual_rms"] = jnum(f.residual_rms);
  j["limit_uncertainty"] = jnum(f.limit_uncertainty);
  j["points"] = f.points;
  j["tag"] = f.tag();
  return j;
}

double scaled_total(const EnergyRow& r, int n) { return std::pow(r.lambda, n - 1) * r.volume; }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::string series_text(const std::vector<double>& x, const std::vector<double>& y) {
  std::string s;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) s += num(x[i]) + ' ' + num(y[i]) + '\n';
  return s;
}

}  // namespace

std::string summary_json(const SweepResult& r) {
  const DiagnosticsConfig& d = r.config.diagnostics;
  const int n = r.config.dimension;
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = "cmclab";
  j["status"] = r.all_converged() ? "ok" : "nonconvergence";
  j["exit_code"] = r.exit_code();
  j["seed"] = r.config.seed;
  j["config"] = serialize_config(r.config, false);
  j["caveats"] = r.caveats;
  j["notes"] = r.notes;
  j["ladder"] = r.lambdas;

  ordered_json points = ordered_json::array();
  for (const SolveRecord& s : r.solves) {
    ordered_json p;
    p["model"] = s.model;
    p["lambda"] = s.lambda;
    p["tau"] = s.tau;
    p["converged"] = s.converged;
    p["iterations"] = s.iterations;
    p["residual"] = jnum(s.residual);
    p["barrier_margin"] = num(s.barrier_margin);
    p["min_convexity"] = jnum(s.min_convexity);
    p["error"] = s.error.empty() ? ordered_json(nullptr) : ordered_json(s.error);
    points.push_back(p);
  }
  j["points"] = points;

  ordered_json fits = ordered_json::array();
  for (const NamedFit& f : r.fits) fits.push_back(fit_json(f.name, f.fit));
  j["fits"] = fits;

  ordered_json checks = ordered_json::array();
  bool all_pass = true;
  for (const Check& c : r.checks) {
    ordered_json k;
    k["name"] = c.name;
    k["pass"] = c.pass;
    k["value"] = jnum(c.value);
    k["tolerance"] = jnum(c.tolerance);
    k["detail"] = c.detail;
    checks.push_back(k);
    all_pass = all_pass && c.pass;
  }
  j["checks"] = checks;
  j["all_checks_pass"] = all_pass;

  ordered_json sections = ordered_json::object();
  {
    ordered_json v;
    v["wedges"] = r.wedge_labels;
    ordered_json rows = ordered_json::array();
    for (const EnergyRow& e : r.energy) {
      ordered_json row;
      row["lambda"] = e.lambda;
      row["wedges"] = e.volumes.wedges;
      row["off_wedges"] = e.volumes.off_wedges;
      row["scaled_total"] = scaled_total(e, n);
      rows.push_back(row);
    }
    v["rows"] = rows;
    sections["volume"] = v;
  }
  if (d.energy) {
    ordered_json e;
    double slab = 0.0;
    const ModelSpec m = r.config.model();
    for (int k : m.wedge_indices()) slab += m.segment(k).width * m.segment(k).cross_section_volume;
    e["slab_constant"] = slab;
    e["energy_constant"] = (n - 1) * slab;
    e["hamiltonian_candidates"] = {slab, std::pow(n - 1, n) * slab};
    double worst = 0.0;
    for (const EnergyRow& row : r.energy) worst = std::max(worst, row.escale_error);
    e["max_escale_error"] = worst;
    sections["energy"] = e;
  }
  if (d.distance) {
    ordered_json q = ordered_json::array();
    for (const DistanceRecord& x : r.distances) {
      ordered_json row;
      row["lambda"] = x.lambda;
      row["query"] = x.query;
      row["clairaut"] = jnum(x.check.clairaut);
      row["mesh"] = jnum(x.check.mesh);
      row["tolerance"] = jnum(x.check.tolerance);
      row["agree"] = x.error.empty() && x.check.agree;
      row["error"] = x.error.empty() ? ordered_json(nullptr) : ordered_json(x.error);
      q.push_back(row);
    }
    sections["distance"] = {{"queries", q}};
  }
  if (d.spectra) {
    ordered_json cls = ordered_json::array();
    for (const ClassSummary& c : r.classes) {
      ordered_json row;
      row["label"] = c.cls.label;
      row["crossings"] = c.cls.crossings;
      row["winding"] = c.cls.winding;
      row["realization"] = c.realization.empty() ? ordered_json(nullptr) : ordered_json(c.realization);
      row["s_tree"] = c.s_tree;
      row["tree_length"] = c.tree_length;
      row["error"] = c.error.empty() ? ordered_json(nullptr) : ordered_json(c.error);
      cls.push_back(row);
    }
    sections["spectra"] = {{"classes", cls}};
  }
  if (r.kasner) {
    ordered_json k;
    k["deviation_decreasing"] = r.kasner->deviation_decreasing;
    k["slope_decreasing"] = r.kasner->slope_decreasing;
    k["curvature_decreasing"] = r.kasner->curvature_decreasing;
    k["exponential_rate"] = jnum(r.kasner->exponential_rate);
    k["predicted_exponential_rate"] = jnum(r.kasner->predicted_exponential_rate);
    k["derivative_bound_theory"] = jnum(r.kasner->derivative_bound_theory);
    sections["kasner"] = k;
  }
  if (r.monotonicity) {
    sections["monotonicity"] = {{"pass", r.monotonicity->pass},
                                {"pairs", r.monotonicity->rows.size()},
                                {"slack", r.monotonicity->slack},
                                {"caveat", r.monotonicity->caveat}};
  }
  if (d.oracle) {
    ordered_json o = ordered_json::array();
    for (const OracleRecord& x : r.oracle)
      o.push_back({{"lambda", x.lambda}, {"measured_order", jnum(x.study.measured_order)}});
    sections["oracle"] = o;
  }
  if (d.flatness) {
    ordered_json f = ordered_json::array();
    for (const FlatnessDiagnostic& x : r.flatness)
      f.push_back({{"kind", to_string(x.kind)}, {"resolution", x.resolution}, {"relative", jnum(x.relative)}});
    sections["flatness"] = f;
  }
  j["sections"] = sections;
  return j.dump(2) + "\n";
}

std::vector<std::string> emit_report(const SweepResult& r, const std::string& directory, EmitMode mode) {
  const fs::path dir(directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + directory + "'");
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    written.push_back(name);
  };
  const DiagnosticsConfig& d = r.config.diagnostics;
  const int n = r.config.dimension;

  std::string caveats;
  for (const std::string& c : r.caveats) caveats += "- " + c + '\n';
  put("caveats.txt", caveats);

  if (mode != EmitMode::json) {
    Table solver({"model", "lambda", "tau", "converged", "iterations", "residual", "barrier_margin",
                  "min_convexity", "error"});
    for (const SolveRecord& s : r.solves)
      solver.row({s.model, num(s.lambda), num(s.tau), flag(s.converged), std::to_string(s.iterations),
                  num(s.residual), num(s.barrier_margin), num(s.min_convexity), s.error});
    put("solver.csv", solver.text());

    Table volume(volume_header(r.wedge_labels));
    for (const EnergyRow& e : r.energy) {
      std::vector<std::string> row{num(e.lambda)};
      for (double w : e.volumes.wedges) row.push_back(num(w));
      row.push_back(num(e.volumes.off_wedges));
      row.push_back(num(scaled_total(e, n)));
      volume.row(row);
    }
    put("volume.csv", volume.text());

    if (d.energy) {
      Table t({"lambda", "tau", "energy", "energy_rescaled", "volume", "hamiltonian", "scaled_energy",
               "scaled_hamiltonian", "scaled_wedge_volume", "scaled_off_volume", "escale_error"});
      for (const EnergyRow& e : r.energy)
        t.row({num(e.lambda), num(e.tau), num(e.energy), num(e.energy_rescaled), num(e.volume), num(e.hamiltonian),
               num(e.scaled_energy), num(e.scaled_hamiltonian), num(e.scaled_wedge_volume),
               num(e.scaled_off_volume), num(e.escale_error)});
      put("energy.csv", t.text());
    }
    if (d.distance) {
      Table t({"lambda", "query", "from_segment", "from_xi", "from_x", "to_segment", "to_xi", "to_x", "clairaut",
               "mesh", "resolution", "tolerance", "agree", "reference", "error"});
      for (const DistanceRecord& x : r.distances)
        t.row({num(x.lambda), x.query, std::to_string(x.from.segment), num(x.from.xi), num(x.from.x),
               std::to_string(x.to.segment), num(x.to.xi), num(x.to.x), num(x.check.clairaut), num(x.check.mesh),
               num(x.check.resolution), num(x.check.tolerance), flag(x.error.empty() && x.check.agree),
               x.reference ? num(*x.reference) : std::string(), x.error});
      put("distance.csv", t.text());
    }
    if (d.spectra) {
      Table c({"class", "crossings", "winding", "realization", "s_tree", "tree_length", "error"});
      for (const ClassSummary& s : r.classes) {
        std::string word;
        for (const std::string& w : s.cls.crossings) word += (word.empty() ? "" : " ") + w;
        c.row({s.cls.label, word, std::to_string(s.cls.winding), s.realization, num(s.s_tree), num(s.tree_length),
               s.error});
      }
      put("classes.csv", c.text());
      Table t({"lambda", "class", "length", "wedge_part", "off_wedge_part", "error"});
      for (const SpectrumRecord& s : r.spectra)
        t.row({num(s.lambda), s.cls, num(s.length.length), num(s.length.wedge_part), num(s.length.off_wedge_part),
               s.error});
      put("spectra.csv", t.text());
    }
    if (r.kasner) {
      Table t({"lambda", "sup_deviation", "sup_slope", "sup_curvature"});
      for (std::size_t i = 0; i < r.kasner->lambdas.size(); ++i)
        t.row({num(r.kasner->lambdas[i]), num(r.kasner->sup_deviation[i]), num(r.kasner->sup_slope[i]),
               num(r.kasner->sup_curvature[i])});
      put("kasner.csv", t.text());
    }
    if (r.monotonicity) {
      Table t({"tau", "tau0", "lower", "middle", "upper", "lower_ok", "upper_ok"});
      for (const MonotonicityRow& m : r.monotonicity->rows)
        t.row({num(m.tau), num(m.tau0), num(m.lower), num(m.middle), num(m.upper), flag(m.lower_ok),
               flag(m.upper_ok)});
      put("monotonicity.csv", t.text());
    }
    if (d.oracle) {
      Table t({"lambda", "step", "sup_relative_residual", "order"});
      for (const OracleRecord& o : r.oracle)
        for (std::size_t i = 0; i < o.study.steps.size(); ++i)
          t.row({num(o.lambda), num(o.study.steps[i]), num(o.study.sup_relative_residual[i]),
                 i == 0 ? std::string() : num(o.study.orders[i - 1])});
      put("oracle.csv", t.text());
    }
    if (d.flatness) {
      Table t({"dimension", "kind", "resolution", "step", "sup_norm", "curvature_scale", "relative", "points"});
      for (const FlatnessDiagnostic& f : r.flatness)
        t.row({std::to_string(f.dimension), to_string(f.kind), std::to_string(f.resolution), num(f.step),
               num(f.sup_norm), num(f.curvature_scale), num(f.relative), std::to_string(f.points)});
      put("flatness.csv", t.text());
    }
    Table fits({"name", "limit", "rate", "constant", "residual_rms", "limit_uncertainty", "points", "tag"});
    for (const NamedFit& f : r.fits)
      fits.row({f.name, num(f.fit.limit), num(f.fit.rate), num(f.fit.constant), num(f.fit.residual_rms),
                num(f.fit.limit_uncertainty), std::to_string(f.fit.points), f.fit.tag()});
    put("fits.csv", fits.text());

    fs::create_directories(dir / "series", ec);
    if (ec) throw IoError("cannot create '" + (dir / "series").string() + "'");
    for (const NamedFit& f : r.fits) put("series/" + f.name + ".dat", series_text(f.fit.lambdas, f.fit.values));
  }
  if (mode != EmitMode::csv) put("summary.json", summary_json(r));
  return written;
}

}  // namespace cmclab
