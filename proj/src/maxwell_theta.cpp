#include "piclab/maxwell_theta.hpp"

#include <numbers>

#include "piclab/csv.hpp"

namespace piclab {

EMState::EMState(const Grid& g) : grid(g), e(VectorField::zeros(g)), b_z(g.size(), 0.0) {
  if (g.dim() != 2) throw Error("the theta-scheme Maxwell stepper needs a 2D grid");
}

namespace {

struct Stencil2D {
  const Grid& g;
  double inv2dx;
  double dx(const std::vector<double>& a, int ix, int iy) const {
    return (a[g.index(g.wrap_index(ix + 1), iy)] - a[g.index(g.wrap_index(ix - 1), iy)]) * inv2dx;
  }
  double dy(const std::vector<double>& a, int ix, int iy) const {
    return (a[g.index(ix, g.wrap_index(iy + 1))] - a[g.index(ix, g.wrap_index(iy - 1))]) * inv2dx;
  }
};

double dot(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) s += a.x[i] * b.x[i] + a.y[i] * b.y[i];
  return s;
}

// out = a + s b
void axpy(VectorField& out, const VectorField& a, double s, const VectorField& b) {
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    out.x[i] = a.x[i] + s * b.x[i];
    out.y[i] = a.y[i] + s * b.y[i];
  }
}

// (I + s2 curl_b curl_e) e
VectorField apply_operator(const VectorField& e, const Grid& grid, double s2) {
  VectorField out = curl_b(curl_e(e, grid), grid);
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    out.x[i] = e.x[i] + s2 * out.x[i];
    out.y[i] = e.y[i] + s2 * out.y[i];
  }
  return out;
}

void check_conforms(const VectorField& f, const Grid& grid, const char* what) {
  if (!f.conforms_to(grid)) throw Error(std::string(what) + " does not conform to the grid");
}

}  // namespace

ScalarField curl_e(const VectorField& e, const Grid& grid) {
  check_conforms(e, grid, "E");
  const Stencil2D d{grid, 0.5 / grid.spacing()};
  ScalarField out(grid.size());
  for (int iy = 0; iy < grid.nodes(); ++iy)
    for (int ix = 0; ix < grid.nodes(); ++ix)
      out[grid.index(ix, iy)] = d.dx(e.y, ix, iy) - d.dy(e.x, ix, iy);
  return out;
}

VectorField curl_b(const ScalarField& b_z, const Grid& grid) {
  if (b_z.size() != grid.size()) throw Error("B_z does not conform to the grid");
  const Stencil2D d{grid, 0.5 / grid.spacing()};
  VectorField out = VectorField::zeros(grid);
  for (int iy = 0; iy < grid.nodes(); ++iy)
    for (int ix = 0; ix < grid.nodes(); ++ix) {
      out.x[grid.index(ix, iy)] = d.dy(b_z, ix, iy);
      out.y[grid.index(ix, iy)] = -d.dx(b_z, ix, iy);
    }
  return out;
}

ThetaStepInfo maxwell_theta_step(EMState& state, const VectorField& j, double dt, double theta,
                                 const ThetaSolveOptions& options) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error("theta must lie in [0, 1]");
  if (!(dt > 0.0)) throw Error("dt must be positive");
  const Grid& grid = state.grid;
  check_conforms(j, grid, "current density");

  const double c2 = 1.0 / (state.eps0 * state.mu0);
  const std::size_t n = grid.size();

  // B~ = B^n - dt (1 - theta) curl E^n
  ScalarField b_tilde = curl_e(state.e, grid);
  for (std::size_t i = 0; i < n; ++i) b_tilde[i] = state.b_z[i] - dt * (1.0 - theta) * b_tilde[i];

  // r = E^n + c^2 dt [(1 - theta) curl B^n + theta curl B~ - mu0 J]
  const VectorField cb_n = curl_b(state.b_z, grid);
  const VectorField cb_tilde = curl_b(b_tilde, grid);
  VectorField rhs = VectorField::zeros(grid);
  for (std::size_t i = 0; i < n; ++i) {
    rhs.x[i] = state.e.x[i] +
               c2 * dt * ((1.0 - theta) * cb_n.x[i] + theta * cb_tilde.x[i] - state.mu0 * j.x[i]);
    rhs.y[i] = state.e.y[i] +
               c2 * dt * ((1.0 - theta) * cb_n.y[i] + theta * cb_tilde.y[i] - state.mu0 * j.y[i]);
  }

  const double s2 = c2 * theta * theta * dt * dt;
  ThetaStepInfo info;
  VectorField e_new = state.e;
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) {
    e_new = rhs;
  } else {
    VectorField r = rhs;
    axpy(r, rhs, -1.0, apply_operator(e_new, grid, s2));
    VectorField p = r;
    double rr = dot(r, r);
    info.relative_residual = std::sqrt(rr) / rhs_norm;
    while (info.relative_residual > options.rel_tol) {
      if (info.iterations == options.max_iters)
        throw ConvergenceError("theta-scheme CG did not converge (relative residual " +
                                   std::to_string(info.relative_residual) + ")",
                               info.relative_residual, info.iterations);
      const VectorField ap = apply_operator(p, grid, s2);
      const double alpha = rr / dot(p, ap);
      axpy(e_new, e_new, alpha, p);
      axpy(r, r, -alpha, ap);
      const double rr_next = dot(r, r);
      axpy(p, r, rr_next / rr, p);
      rr = rr_next;
      ++info.iterations;
      info.relative_residual = std::sqrt(rr) / rhs_norm;
    }
  }

  // B^{n+1} = B~ - theta dt curl E^{n+1}
  const ScalarField ce_new = curl_e(e_new, grid);
  for (std::size_t i = 0; i < n; ++i) state.b_z[i] = b_tilde[i] - theta * dt * ce_new[i];
  state.e = std::move(e_new);
  state.time += dt;
  return info;
}

double em_energy(const EMState& state) {
  double sum = 0.0;
  for (std::size_t i = 0; i < state.b_z.size(); ++i)
    sum += state.eps0 * (state.e.x[i] * state.e.x[i] + state.e.y[i] * state.e.y[i]) +
           state.b_z[i] * state.b_z[i] / state.mu0;
  return 0.5 * sum * state.grid.cell_volume();
}

double divergence_error(const EMState& state, const ScalarField& rho) {
  const Grid& grid = state.grid;
  if (rho.size() != grid.size()) throw Error("charge density does not conform to the grid");
  const Stencil2D d{grid, 0.5 / grid.spacing()};
  double worst = 0.0;
  for (int iy = 0; iy < grid.nodes(); ++iy)
    for (int ix = 0; ix < grid.nodes(); ++ix) {
      const double div = d.dx(state.e.x, ix, iy) + d.dy(state.e.y, ix, iy);
      worst = std::max(worst, std::abs(div - rho[grid.index(ix, iy)] / state.eps0));
    }
  return worst;
}

EMState plane_wave(const Grid& grid, int mode, double amplitude) {
  EMState state(grid);
  const double k = 2.0 * std::numbers::pi * mode / grid.length();
  const double c = state.wave_speed();
  for (int iy = 0; iy < grid.nodes(); ++iy)
    for (int ix = 0; ix < grid.nodes(); ++ix) {
      const double phase = std::cos(k * grid.node_position(ix));
      state.e.y[grid.index(ix, iy)] = amplitude * phase;
      state.b_z[grid.index(ix, iy)] = amplitude * phase / c;
    }
  return state;
}

void write_em_state_csv(const std::filesystem::path& path, const EMState& state) {
  CsvWriter csv(path, {"Ex", "Ey", "Bz"});
  for (std::size_t i = 0; i < state.b_z.size(); ++i) {
    csv << state.e.x[i] << state.e.y[i] << state.b_z[i];
    csv.end_row();
  }
}

}  // namespace piclab
