// Theta-weighted implicit stepping of the TE_z Maxwell system (E_x, E_y, B_z)
// on a periodic colocated 2D grid with central-difference curls:
//
//   curl E^{n+theta} + (B^{n+1} - B^n) / dt = 0
//   curl B^{n+theta} - (E^{n+1} - E^n) / (c^2 dt) = mu0 J^{n+1/2}
//
// with f^{n+theta} = theta f^{n+1} + (1 - theta) f^n. Eliminating B^{n+1}
// leaves the SPD system (I + (c theta dt)^2 curl^T curl) E^{n+1} = r, which
// is solved matrix-free by conjugate gradients.

#ifndef PICLAB_MAXWELL_THETA_HPP
#define PICLAB_MAXWELL_THETA_HPP

#include <cmath>
#include <filesystem>

#include "piclab/domain.hpp"

namespace piclab {

struct EMState {
  Grid grid;
  VectorField e;
  ScalarField b_z;
  double time = 0.0;
  double eps0 = 1.0;
  double mu0 = 1.0;

  explicit EMState(const Grid& g);
  double wave_speed() const { return 1.0 / std::sqrt(eps0 * mu0); }
};

struct ThetaSolveOptions {
  /// Relative CG residual; tight enough that theta = 1/2 conserves energy
  /// to round-off over long runs.
  double rel_tol = 1e-13;
  int max_iters = 500;
};

struct ThetaStepInfo {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Advances `state` by dt. `j` is J^{n+1/2} (2 components per node).
/// Throws ConvergenceError if CG does not reach the tolerance.
ThetaStepInfo maxwell_theta_step(EMState& state, const VectorField& j, double dt, double theta,
                                 const ThetaSolveOptions& options = {});

/// 1/2 sum (eps0 |E|^2 + B_z^2 / mu0) dx dy.
double em_energy(const EMState& state);

/// Scalar z-curl D_x E_y - D_y E_x.
ScalarField curl_e(const VectorField& e, const Grid& grid);
/// (D_y B_z, -D_x B_z); the adjoint of curl_e.
VectorField curl_b(const ScalarField& b_z, const Grid& grid);

/// max |div E - rho / eps0|. Diagnostic only; the stepper does not project.
double divergence_error(const EMState& state, const ScalarField& rho);

/// Plane wave E_y = B_z / c = cos(2 pi mode x / L) travelling in +x.
EMState plane_wave(const Grid& grid, int mode = 1, double amplitude = 1.0);

/// Row-major CSV with columns Ex,Ey,Bz.
void write_em_state_csv(const std::filesystem::path& path, const EMState& state);

}  // namespace piclab

#endif  // PICLAB_MAXWELL_THETA_HPP
