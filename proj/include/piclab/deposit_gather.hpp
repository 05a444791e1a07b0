// Particle <-> grid coupling through the shape function S(x - X_j).
//
// Deposition and gather share the same 1D stencil so that the force a grid
// exerts on the particles is the adjoint of the charge they deposit.

#ifndef PICLAB_DEPOSIT_GATHER_HPP
#define PICLAB_DEPOSIT_GATHER_HPP

#include "piclab/domain.hpp"

namespace piclab {

/// S(d) for node spacing dx. Order 1 is the CIC hat; order 0 is the NGP box,
/// which assigns a tie at |d| = dx/2 to the lower-index node (see stencil()).
double shape_weight(double d, double dx, ShapeOrder order);

/// The (at most) two nodes a wrapped coordinate touches along one axis.
struct Stencil1D {
  int lower;
  int upper;
  double w_lower;
  double w_upper;
};

/// Throws if x is outside [0, L).
Stencil1D stencil(double x, const Grid& grid, ShapeOrder order);

/// rho_j = dx^-d sum_i q_i S(x_i - X_j), summed in ascending particle order.
ScalarField deposit_charge(const ParticleEnsemble& particles, const Grid& grid, ShapeOrder order);

/// E at x from the node values with the deposition shape. Unused components are 0.
Vec3 gather_field(const VectorField& e, const Vec3& x, const Grid& grid, ShapeOrder order);

/// gather_field of the nodewise average (E_n + E_np1) / 2.
Vec3 gather_time_averaged(const VectorField& e_n, const VectorField& e_np1, const Vec3& x,
                          const Grid& grid, ShapeOrder order);

}  // namespace piclab

#endif  // PICLAB_DEPOSIT_GATHER_HPP
