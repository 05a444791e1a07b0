#include "piclab/deposit_gather.hpp"

#include <cmath>

namespace piclab {

double shape_weight(double d, double dx, ShapeOrder order) {
  const double r = std::abs(d) / dx;
  if (order == ShapeOrder::cic) return r < 1.0 ? 1.0 - r : 0.0;
  // Half-open cell (-dx/2, dx/2]: a particle exactly halfway belongs to the
  // node below it, i.e. the node for which d = +dx/2.
  return (d > -0.5 * dx && d <= 0.5 * dx) ? 1.0 : 0.0;
}

Stencil1D stencil(double x, const Grid& grid, ShapeOrder order) {
  if (!(x >= 0.0 && x < grid.length()))
    throw Error("position " + std::to_string(x) + " is outside [0, L); wrap before depositing");
  const double s = x / grid.spacing();
  int i = static_cast<int>(std::floor(s));
  double f = s - i;
  if (i >= grid.nodes()) {
    // x just below L can land on s == NG after division.
    i = grid.nodes() - 1;
    f = 1.0;
  }
  const int next = i + 1 == grid.nodes() ? 0 : i + 1;
  if (order == ShapeOrder::cic) return {i, next, 1.0 - f, f};
  // NGP: a tie at f == 0.5 stays on the lower node.
  if (f > 0.5) return {next, next, 1.0, 0.0};
  return {i, i, 1.0, 0.0};
}

ScalarField deposit_charge(const ParticleEnsemble& particles, const Grid& grid,
                           ShapeOrder order) {
  if (particles.dim != grid.dim()) throw Error("ensemble and grid dimensions differ");
  ScalarField rho(grid.size(), 0.0);
  const double q = particles.particle_charge() / grid.cell_volume();
  if (grid.dim() == 1) {
    for (const auto& x : particles.x) {
      const auto s = stencil(x.x, grid, order);
      rho[s.lower] += q * s.w_lower;
      rho[s.upper] += q * s.w_upper;
    }
    return rho;
  }
  for (const auto& x : particles.x) {
    const auto sx = stencil(x.x, grid, order);
    const auto sy = stencil(x.y, grid, order);
    rho[grid.index(sx.lower, sy.lower)] += q * sx.w_lower * sy.w_lower;
    rho[grid.index(sx.upper, sy.lower)] += q * sx.w_upper * sy.w_lower;
    rho[grid.index(sx.lower, sy.upper)] += q * sx.w_lower * sy.w_upper;
    rho[grid.index(sx.upper, sy.upper)] += q * sx.w_upper * sy.w_upper;
  }
  return rho;
}

Vec3 gather_field(const VectorField& e, const Vec3& x, const Grid& grid, ShapeOrder order) {
  if (!e.conforms_to(grid)) throw Error("field array does not conform to the grid");
  const auto sx = stencil(x.x, grid, order);
  if (grid.dim() == 1) return {e.x[sx.lower] * sx.w_lower + e.x[sx.upper] * sx.w_upper, 0.0, 0.0};

  const auto sy = stencil(x.y, grid, order);
  const std::size_t ll = grid.index(sx.lower, sy.lower);
  const std::size_t ul = grid.index(sx.upper, sy.lower);
  const std::size_t lu = grid.index(sx.lower, sy.upper);
  const std::size_t uu = grid.index(sx.upper, sy.upper);
  const double wll = sx.w_lower * sy.w_lower;
  const double wul = sx.w_upper * sy.w_lower;
  const double wlu = sx.w_lower * sy.w_upper;
  const double wuu = sx.w_upper * sy.w_upper;
  return {e.x[ll] * wll + e.x[ul] * wul + e.x[lu] * wlu + e.x[uu] * wuu,
          e.y[ll] * wll + e.y[ul] * wul + e.y[lu] * wlu + e.y[uu] * wuu, 0.0};
}

Vec3 gather_time_averaged(const VectorField& e_n, const VectorField& e_np1, const Vec3& x,
                          const Grid& grid, ShapeOrder order) {
  if (!e_n.conforms_to(grid) || !e_np1.conforms_to(grid))
    throw Error("field array does not conform to the grid");
  VectorField avg = e_n;
  for (std::size_t i = 0; i < avg.x.size(); ++i) avg.x[i] = 0.5 * (e_n.x[i] + e_np1.x[i]);
  for (std::size_t i = 0; i < avg.y.size(); ++i) avg.y[i] = 0.5 * (e_n.y[i] + e_np1.y[i]);
  return gather_field(avg, x, grid, order);
}

}  // namespace piclab
