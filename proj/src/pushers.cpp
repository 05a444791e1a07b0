#include "piclab/pushers.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "piclab/deposit_gather.hpp"

namespace piclab {

FieldAccessor::FieldAccessor(ElectricFn electric, double b_z)
    : electric_(std::move(electric)), b_z_(b_z) {}

FieldAccessor FieldAccessor::gathered(const Grid& grid, const VectorField& e, ShapeOrder order,
                                      double b_z) {
  if (!e.conforms_to(grid)) throw Error("field array does not conform to the grid");
  FieldAccessor f;
  f.grid_ = &grid;
  f.e_ = &e;
  f.order_ = order;
  f.b_z_ = b_z;
  return f;
}

FieldAccessor FieldAccessor::magnetic_only(double b_z) {
  return FieldAccessor([](const Vec3&) { return Vec3{}; }, b_z);
}

Vec3 FieldAccessor::electric(const Vec3& x) const {
  if (e_) return gather_field(*e_, wrap_periodic(x, grid_->length(), grid_->dim()), *grid_, order_);
  return electric_(x);
}

Vec3 rotate_clockwise(const Vec3& v, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {v.x * c + v.y * s, v.y * c - v.x * s, v.z};
}

namespace {

// v x (b e_z) scaled by q/m, i.e. Omega (v_y, -v_x, 0).
Vec3 magnetic_acceleration(const Vec3& v, double omega) { return {omega * v.y, -omega * v.x, 0.0}; }

// Boris rotation with t = tan(Omega dt / 2): turns v by exactly Omega dt.
Vec3 boris_rotation(const Vec3& v, double omega_dt) {
  const double t = std::tan(0.5 * omega_dt);
  const double s = 2.0 * t / (1.0 + t * t);
  const Vec3 v_prime{v.x + t * v.y, v.y - t * v.x, v.z};
  return {v.x + s * v_prime.y, v.y - s * v_prime.x, v.z};
}

}  // namespace

PhaseState euler_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                      const Species& species) {
  const double qm = species.charge_to_mass();
  const double omega = gyrofrequency(species, fields.b_z());
  PhaseState out;
  out.x = s.x + s.v * dt;
  out.v = s.v + (fields.electric(out.x) * qm + magnetic_acceleration(s.v, omega)) * dt;
  return out;
}

PhaseState boris_es_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                         const Species& species) {
  const double qm = species.charge_to_mass();
  const Vec3 x_half = s.x + s.v * (0.5 * dt);
  PhaseState out;
  out.v = s.v + fields.electric(x_half) * (qm * dt);
  out.x = x_half + out.v * (0.5 * dt);
  return out;
}

PhaseState boris_em_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                         const Species& species, MagneticSubstep magnetic) {
  const double qm = species.charge_to_mass();
  const double omega = gyrofrequency(species, fields.b_z());

  const Vec3 x_half = s.x + s.v * (0.5 * dt);
  const Vec3 v_half = s.v + fields.electric(x_half) * (0.5 * qm * dt);
  const Vec3 v_star = magnetic == MagneticSubstep::rotation
                          ? boris_rotation(v_half, omega * dt)
                          : v_half + magnetic_acceleration(v_half, omega) * dt;
  const Vec3 x_star_half = s.x + v_star * (0.5 * dt);

  PhaseState out;
  out.v = v_star + fields.electric(x_star_half) * (0.5 * qm * dt);
  out.x = x_half + out.v * (0.5 * dt);
  return out;
}

PhaseState boris_filter_step(const PhaseState& s, double dt, const FieldAccessor& filtered,
                             const Species& species, int dim, MagneticSubstep magnetic) {
  if (dim == 1) return boris_es_step(s, dt, filtered, species);
  return boris_em_step(s, dt, filtered, species, magnetic);
}

PhaseState larmor_half_step(const PhaseState& s, double dt, double omega) {
  if (omega == 0.0)
    throw Error("cyclotronic step needs a nonzero Larmor frequency; use boris-em when B = 0");
  const double theta = 0.5 * omega * dt;
  const double sn = std::sin(theta);
  const double c = std::cos(theta);
  // 1 - cos(theta) written as 2 sin^2(theta/2) to avoid cancellation.
  const double sh = std::sin(0.5 * theta);
  const double one_minus_c = 2.0 * sh * sh;

  PhaseState out;
  out.x.x = s.x.x + (s.v.y * one_minus_c + s.v.x * sn) / omega;
  out.x.y = s.x.y + (-s.v.x * one_minus_c + s.v.y * sn) / omega;
  out.x.z = s.x.z + s.v.z * (0.5 * dt);
  out.v = {s.v.x * c + s.v.y * sn, s.v.y * c - s.v.x * sn, s.v.z};
  return out;
}

PhaseState cyclotronic_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                            const Species& species) {
  const double omega = gyrofrequency(species, fields.b_z());
  PhaseState mid = larmor_half_step(s, dt, omega);
  mid.v += fields.electric(mid.x) * (species.charge_to_mass() * dt);
  return larmor_half_step(mid, dt, omega);
}

ImplicitResult implicit_boris_step(const PhaseState& s, double dt, const FieldAccessor& fields,
                                   const Species& species, const ImplicitOptions& options) {
  const double qm = species.charge_to_mass();
  const double c = 0.5 * dt * gyrofrequency(species, fields.b_z());
  const double denom = 1.0 + c * c;

  PhaseState current = s;
  double delta = 0.0;
  for (int sweep = 1; sweep <= options.max_iters; ++sweep) {
    const Vec3 mid = (s.x + current.x) * 0.5;
    // Explicit part of v' = v + dt a + c (v' + v) x e_z.
    const Vec3 u = s.v + fields.electric(mid) * (qm * dt) + Vec3{c * s.v.y, -c * s.v.x, 0.0} -
                   fields.grad_b_magnitude(mid) * (options.magnetic_moment * dt);
    PhaseState next;
    next.v = {(u.x + c * u.y) / denom, (u.y - c * u.x) / denom, u.z};
    next.x = s.x + (next.v + s.v) * (0.5 * dt);

    delta = std::max(norm(next.x - current.x), norm(next.v - current.v));
    current = next;
    if (delta < options.tol) return {current, sweep - 1, delta};
  }
  throw ConvergenceError("implicit Boris fixed point did not converge in " +
                             std::to_string(options.max_iters) +
                             " sweeps (last update " + std::to_string(delta) + ")",
                         delta, options.max_iters);
}

StepScheme StepScheme::from_config(const SimConfig& config) {
  StepScheme scheme;
  scheme.kind = config.pusher;
  scheme.dim = config.dim();
  scheme.magnetic = config.magnetic_substep;
  scheme.implicit.tol = config.implicit_tol;
  scheme.implicit.max_iters = config.implicit_max_iters;
  return scheme;
}

PhaseState push(const StepScheme& scheme, const PhaseState& s, double dt,
                const FieldAccessor& fields, const Species& species) {
  switch (scheme.kind) {
    case PusherKind::euler:
      return euler_step(s, dt, fields, species);
    case PusherKind::boris_es:
      return boris_es_step(s, dt, fields, species);
    case PusherKind::boris_em:
      return boris_em_step(s, dt, fields, species, scheme.magnetic);
    case PusherKind::boris_filter:
      return boris_filter_step(s, dt, fields, species, scheme.dim, scheme.magnetic);
    case PusherKind::cyclotronic:
      return cyclotronic_step(s, dt, fields, species);
    case PusherKind::implicit_boris:
      return implicit_boris_step(s, dt, fields, species, scheme.implicit).state;
  }
  throw Error("unhandled pusher kind");
}

Vec3 field_sample_position(const StepScheme& scheme, const PhaseState& s, double dt, double b_z,
                           const Species& species) {
  switch (scheme.kind) {
    case PusherKind::euler:
      return s.x + s.v * dt;
    case PusherKind::boris_es:
    case PusherKind::boris_em:
    case PusherKind::boris_filter:
      return s.x + s.v * (0.5 * dt);
    case PusherKind::cyclotronic:
      return larmor_half_step(s, dt, gyrofrequency(species, b_z)).x;
    case PusherKind::implicit_boris:
      return s.x;
  }
  throw Error("unhandled pusher kind");
}

}  // namespace piclab
