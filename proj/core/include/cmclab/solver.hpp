#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cmclab/errors.hpp"
#include "cmclab/mean_curvature.hpp"
#include "cmclab/model.hpp"

namespace cmclab {

enum class InitialGuess {
  barrier_midpoint,  // constant (1 + n/(n-1))/2 in rescaled units
  reference_levels,  // 1 on wedges, n/(n-1) on collars
  continuation,      // previous field supplied by the caller
};

std::string to_string(InitialGuess guess);

struct SolverConfig {
  // Sup-norm of the residual relative to |tau|.
  double tolerance = 1e-10;
  int max_iterations = 50;
  // Cells per unit of rescaled chain length; every piece gets at least
  // min_cells cells.
  double cells_per_unit = 20.0;
  int min_cells = 16;
  double min_damping = 1.0 / 1024.0;
  // Cap on the full Newton steps taken after the tolerance is met; they drive
  // the exponentially small interior deviations to full relative precision.
  int polish_iterations = 24;
  InitialGuess initial_guess = InitialGuess::barrier_midpoint;

  void validate() const;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct HeightNode {
  int piece = 0;
  int segment = 0;
  double xi = 0.0;  // local chain coordinate inside the segment
  double u = 0.0;
  double du = 0.0;
  double d2u = 0.0;
  // Rescaled height lambda * u minus the reference level of the piece (1 on
  // wedges, n/(n-1) on collars), with its first and second derivatives in
  // rescaled chain units. Kept in extended precision: deep inside long wedges
  // these decay far below the range of double.
  long double excess = 0;
  long double excess_slope = 0;
  long double excess_curvature = 0;
  double residual = 0.0;  // relative mean-curvature residual at the node
};

struct PieceRange {
  Piece piece;
  int first = 0;  // index of the first node of the piece
  int cells = 0;  // nodes first .. first + cells
  double h = 0.0; // spacing in the field's chain coordinate
};

// A sampled CMC leaf rho = u(xi) with mean curvature tau. Seam points appear
// once per adjoining piece, carrying that piece's one-sided derivatives.
class HeightField {
 public:
  std::shared_ptr<const ModelSpec> model;
  double tau = -1.0;
  double lambda = 1.0;
  std::vector<PieceRange> pieces;
  std::vector<HeightNode> nodes;
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;

  int dimension() const { return model->dimension(); }
  Jet jet(int node) const {
    const HeightNode& p = nodes.at(static_cast<std::size_t>(node));
    return {p.u, p.du, p.d2u};
  }
  // Global chain coordinate (segment offset + local xi).
  double chain_coordinate(int node) const;
  double reference_level(const Piece& piece) const;
  double reference_level_scaled(const Piece& piece) const;

  // Field in the primed coordinates of the rescaled model: u_lambda = lambda u,
  // wedges stretched by lambda, mean curvature -(n-1).
  HeightField rescale() const;

  // Height interpolated at a chain point (cubic Hermite on the piece).
  double height_at(int segment, double xi) const;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, HeightField partial)
      : Error(what), partial_(std::make_shared<HeightField>(std::move(partial))) {}
  const HeightField& partial() const { return *partial_; }

 private:
  std::shared_ptr<HeightField> partial_;
};

// Solves the CMC boundary-value problem for mean curvature tau by damped
// Newton iteration on the rescaled model. Throws NoConvergence or
// NotSpacelike.
HeightField solve_cmc_leaf(const ModelSpec& model, double tau, const SolverConfig& config,
                           const HeightField* previous = nullptr);

// Number of cells used on each piece of the model at mean curvature tau.
std::vector<int> piece_cells(const ModelSpec& model, double tau, const SolverConfig& config);

// Smallest signed distance of lambda * u to the barriers 1 and n/(n-1) over
// all nodes; positive means strictly inside.
long double barrier_margin(const HeightField& field);

// Whether the barrier inequalities are expected to be strict for this model.
// They are equalities for the pure cone and the pure Kasner (all-wedge) model.
bool barrier_is_strict(const ModelSpec& model);

// Minimum over wedge nodes and sampled y of d^2/dr^2 sqrt(u_lambda^2 + y^2),
// in rescaled units.
double min_embedded_convexity(const HeightField& field);

// Columnar serialization: xi, segment, u, du, d2u, residual.
void write_height_field_csv(const HeightField& field, std::ostream& os);

}  // namespace cmclab
