#pragma once

// Weighted multicurves, the dual tree of a chain and marked length spectra of
// CMC leaves.

#include <map>
#include <string>
#include <vector>

#include "cmclab/fit.hpp"
#include "cmclab/leaf_geometry.hpp"

namespace cmclab {

struct MultiCurveEntry {
  std::string label;
  double weight = 0.0;  // wedge width
  double volume = 0.0;  // cross-section volume
};

struct MultiCurve {
  std::vector<MultiCurveEntry> entries;  // in the order of the model's wedges

  // One entry per wedge segment of the model.
  static MultiCurve from_model(const ModelSpec& model);
  // Throws ValidationError on non-positive weights or repeated labels.
  void validate() const;
  // Throws UnknownLabel.
  const MultiCurveEntry& entry(const std::string& label) const;
};

// Free homotopy class given by its cyclic crossing word over wedge labels and
// the winding number around the cross-section (n = 2 only).
struct CurveClass {
  std::string label;
  std::vector<std::string> crossings;
  int winding = 0;

  std::map<std::string, int> counts() const;
  bool trivial() const { return crossings.empty() && winding == 0; }
  friend bool operator==(const CurveClass&, const CurveClass&) = default;
};

// Sum of m_k l_k over the crossing word; throws UnknownLabel.
double measure_spectrum(const MultiCurve& curve, const CurveClass& cls);

// Universal cover of the chain a crossing word runs around: a line whose
// edges repeat the word's wedge widths. Complementary regions collapse to the
// vertices. The class acts by the deck translation through one word period.
class DualTree {
 public:
  DualTree(const MultiCurve& curve, const CurveClass& cls, int periods = 3);

  int vertex_count() const { return static_cast<int>(adjacency_.size()); }
  int period() const { return period_; }
  // Tree distance between points given as (edge, fraction along the edge).
  double distance(int edge_a, double t_a, int edge_b, double t_b) const;
  // Image of a vertex under the deck translation.
  int translate(int vertex) const { return vertex + period_; }
  double edge_length(int edge) const { return lengths_.at(static_cast<std::size_t>(edge)); }
  int edge_count() const { return static_cast<int>(lengths_.size()); }

 private:
  double vertex_distance(int a, int b) const;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
  std::vector<double> lengths_;
  int period_ = 0;
};

struct TranslationLength {
  double length = 0.0;       // d(v, alpha v) at a vertex of the axis
  double brute_force = 0.0;  // inf of d(p, alpha p) over sampled points
  double resolution = 1e-4;
  bool hyperbolic = true;    // false for the trivial word (length 0)
};

TranslationLength tree_translation_length(const MultiCurve& curve, const CurveClass& cls,
                                          double resolution = 1e-4);

// How a class is realized in a reduced model.
struct ClassRealization {
  enum class Kind {
    base_chain,      // the model's chain is one period of the class
    word_necklace,   // periodic necklace built from the crossing word
    collar_winding,  // no crossings: a cross-section curve
  };
  Kind kind = Kind::base_chain;
  ModelSpec model;   // model whose leaf carries the geodesic
  int periods = 1;   // chain periods covered by one turn of the class
  double dx = 0.0;   // total cross-section displacement (winding * L)
  std::string describe() const;
};

// Chooses the model for a class: the base chain when the word is a power of
// the chain's wedge cycle (periodic models, or truncated single-wedge models
// with Neumann ends and equal outer collars, whose leaf extends by reflection
// to the tent necklace), otherwise a necklace built from the word with the
// base model's collar width. Throws ClassNotRealizable (winding in n >= 3,
// unknown labels in the model) or UnknownLabel.
ClassRealization realize_class(const ModelSpec& model, const MultiCurve& curve, const CurveClass& cls);

struct ClassLength {
  double length = 0.0;
  double wedge_part = 0.0;
  double off_wedge_part = 0.0;
};

// Shortest closed curve of the class on the leaf, assembled from Clairaut
// geodesics. The field's model must realize the class directly (base chain or
// collar winding); throws ClassNotRealizable otherwise.
ClassLength leaf_length_spectrum(const HeightField& field, const CurveClass& cls);

struct ClassSpectrum {
  CurveClass cls;
  std::string realization;
  double s_tree = 0.0;
  std::vector<double> lengths;
  std::vector<double> wedge_parts;
  std::vector<double> off_wedge_parts;
  ConvergenceFit fit;
  double tolerance = 0.0;  // 1% of max(s_T, smallest wedge width)
  bool pass = false;
};

struct SpectrumReport {
  std::vector<double> lambdas;
  std::vector<ClassSpectrum> classes;
  // Marked-spectrum proxy for Gromov convergence: max over classes of
  // |l(c) - s_T(c)| per lambda.
  std::vector<double> max_deviation;
  bool deviation_decreasing = false;
  bool pass = false;
};

// Solves every realization model along the ladder (jobs worker threads) and
// fits each class's lengths. Needs at least four ladder points and three
// classes including a pure winding one.
SpectrumReport spectrum_convergence_report(const ModelSpec& model, const MultiCurve& curve,
                                           const std::vector<CurveClass>& classes,
                                           const std::vector<double>& lambdas,
                                           const SolverConfig& config, int jobs = 1);

}  // namespace cmclab
