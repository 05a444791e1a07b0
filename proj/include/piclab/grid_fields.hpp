// Periodic field solvers on the node-centered grid.
//
// Convention: lap(phi) = -rho / eps0 and E = -grad(phi), so div E = rho / eps0.

#ifndef PICLAB_GRID_FIELDS_HPP
#define PICLAB_GRID_FIELDS_HPP

#include <filesystem>
#include <memory>

#include "piclab/domain.hpp"

namespace piclab {

struct PoissonSolution {
  ScalarField phi;  ///< zero-mean gauge
  VectorField e;
  /// max |L_h phi + (rho - mean rho) / eps0| of the returned potential.
  double residual = 0.0;
};

/// Spectral solve of the 3-point (1D) or 5-point (2D) periodic Laplacian.
/// Owns FFT plans sized to one grid; reuse it across steps.
class PoissonSolver {
 public:
  explicit PoissonSolver(const Grid& grid, double eps0 = 1.0);
  ~PoissonSolver();
  PoissonSolver(PoissonSolver&&) noexcept;
  PoissonSolver& operator=(PoissonSolver&&) noexcept;
  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  const Grid& grid() const { return grid_; }
  /// The mean of rho is removed first (periodic compatibility).
  PoissonSolution solve(const ScalarField& rho);
  /// Potential only, no gradient or residual.
  void solve_potential(const ScalarField& rho, ScalarField& phi);

 private:
  struct Plans;
  Grid grid_;
  double eps0_;
  std::unique_ptr<Plans> plans_;
};

PoissonSolution solve_poisson_1d(const ScalarField& rho, const Grid& grid);
PoissonSolution solve_poisson_2d(const ScalarField& rho, const Grid& grid);

/// Standard 3-point / 5-point periodic Laplacian.
ScalarField discrete_laplacian(const ScalarField& phi, const Grid& grid);

/// E_j = -(phi_{j+1} - phi_{j-1}) / (2 dx) per axis, periodic.
VectorField gradient_to_field(const ScalarField& phi, const Grid& grid);
void gradient_to_field(const ScalarField& phi, const Grid& grid, VectorField& e);

/// `passes` applications of the 1-2-1 binomial stencil along every axis.
VectorField filter_field(const VectorField& e, const Grid& grid, int passes);

/// CSV with columns node_index[,node_index_y],value (row-major in 2D).
void write_field_csv(const std::filesystem::path& path, const ScalarField& values,
                     const Grid& grid);

}  // namespace piclab

#endif  // PICLAB_GRID_FIELDS_HPP
