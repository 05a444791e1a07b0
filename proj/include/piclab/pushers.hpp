// Single-particle time integrators.
//
// Every pusher maps (x^n, v^n) to (x^{n+1}, v^{n+1}) given a FieldAccessor
// for E at arbitrary positions and a uniform external B = b_z e_z. Returned
// positions are not wrapped; the accessor wraps before gathering.
//
// Sign convention shared by all schemes: with Omega = q b_z / m,
//   dv_x/dt = (q/m) E_x + Omega v_y,   dv_y/dt = (q/m) E_y - Omega v_x,
// so a positive Omega turns v clockwise in the x-y plane.

#ifndef PICLAB_PUSHERS_HPP
#define PICLAB_PUSHERS_HPP

#include <functional>

#include "piclab/config.hpp"
#include "piclab/domain.hpp"

namespace piclab {

struct PhaseState {
  Vec3 x;
  Vec3 v;
};

/// Read-only view of the fields a pusher sees during one push phase.
class FieldAccessor {
 public:
  using ElectricFn = std::function<Vec3(const Vec3&)>;

  /// Analytic electric field (frozen-field studies).
  FieldAccessor(ElectricFn electric, double b_z);

  /// Gathers from node values. `grid` and `e` must outlive the accessor.
  static FieldAccessor gathered(const Grid& grid, const VectorField& e, ShapeOrder order,
                                double b_z);

  /// Zero electric field.
  static FieldAccessor magnetic_only(double b_z);

  Vec3 electric(const Vec3& x) const;
  double b_z() const { return b_z_; }
  /// grad |B|; identically zero for the uniform external field.
  Vec3 grad_b_magnitude(const Vec3&) const { return {}; }

 private:
  FieldAccessor() = default;

  ElectricFn electric_;
  const Grid* grid_ = nullptr;
  const VectorField* e_ = nullptr;
  ShapeOrder order_ = ShapeOrder::cic;
  double b_z_ = 0.0;
};

/// Clockwise rotation by angle theta: (v_x cos + v_y sin, v_y cos - v_x sin).
Vec3 rotate_clockwise(const Vec3& v, double theta);

/// A-B splitting: x' = x + v dt, then v' = v + (q/m) dt (E(x') + v x B).
PhaseState euler_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                      const Species& species);

/// Drift-kick-drift with E gathered at x + v dt/2.
PhaseState boris_es_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                         const Species& species);

/// Strang split: half drift, half kick, magnetic substep, half drift at v*,
/// second half kick, final half drift.
PhaseState boris_em_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                         const Species& species,
                         MagneticSubstep magnetic = MagneticSubstep::rotation);

/// The Boris scheme for the grid dimension (boris_es in 1D, boris_em in 2D).
/// The caller supplies an accessor over the filtered field array.
PhaseState boris_filter_step(const PhaseState& s, double dt, const FieldAccessor& filtered,
                             const Species& species, int dim,
                             MagneticSubstep magnetic = MagneticSubstep::rotation);

/// Exact Larmor rotation and drift over dt/2 (x, y, v_x, v_y; z drifts with v_z).
PhaseState larmor_half_step(const PhaseState& s, double dt, double omega);

/// Half exact gyration, full electric impulse at x^{n+1/2}, half exact gyration.
/// Throws if Omega = 0.
PhaseState cyclotronic_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                            const Species& species);

struct ImplicitOptions {
  double tol = 1e-12;
  int max_iters = 50;
  /// mu in the -mu dt grad|B| force; irrelevant while grad|B| = 0.
  double magnetic_moment = 0.0;
};

struct ImplicitResult {
  PhaseState state;
  /// Sweeps that changed the iterate (the confirming sweep is not counted).
  int iterations = 0;
  double residual = 0.0;
};

/// x' = x + dt (v' + v)/2,
/// v' = v + (q dt/m)(E((x + x')/2) + (v' + v)/2 x B) - mu dt grad|B|.
/// Each sweep freezes E at the current midpoint and solves the velocity
/// equation exactly (a Crank-Nicolson rotation), then updates x'.
/// Throws ConvergenceError after max_iters sweeps.
ImplicitResult implicit_boris_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                                   const Species& species, const ImplicitOptions& options = {});

/// A pusher kind bound to its run-time options.
struct StepScheme {
  PusherKind kind = PusherKind::euler;
  int dim = 1;
  MagneticSubstep magnetic = MagneticSubstep::rotation;
  ImplicitOptions implicit;

  static StepScheme from_config(const SimConfig& config);
};

PhaseState push(const StepScheme& scheme, const PhaseState& s, double dt,
                const FieldAccessor& fields, const Species& species);

/// Position at which the scheme first samples E. A self-consistent run solves
/// the field from these positions before pushing.
Vec3 field_sample_position(const StepScheme& scheme, const PhaseState& s, double dt,
                           double b_z, const Species& species);

}  // namespace piclab

#endif  // PICLAB_PUSHERS_HPP
