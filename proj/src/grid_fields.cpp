#include "piclab/grid_fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "piclab/csv.hpp"

namespace piclab {

struct PoissonSolver::Plans {
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  /// 1 / (eps0 * lambda_k * N) per retained mode; 0 for the mean.
  std::vector<double> inverse_symbol;

  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spectrum);
  }
};

namespace {

/// Eigenvalue of the negative 3-point second difference for mode k.
double laplacian_symbol(int k, int n, double dx) {
  return (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n)) / (dx * dx);
}

}  // namespace

PoissonSolver::PoissonSolver(const Grid& grid, double eps0)
    : grid_(grid), eps0_(eps0), plans_(std::make_unique<Plans>()) {
  const int n = grid.nodes();
  const double dx = grid.spacing();
  const int half = n / 2 + 1;
  const std::size_t spectral = grid.dim() == 1 ? half : static_cast<std::size_t>(n) * half;
  const double total = static_cast<double>(grid.size());

  plans_->real = fftw_alloc_real(grid.size());
  plans_->spectrum = fftw_alloc_complex(spectral);
  if (grid.dim() == 1) {
    plans_->forward = fftw_plan_dft_r2c_1d(n, plans_->real, plans_->spectrum, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_1d(n, plans_->spectrum, plans_->real, FFTW_ESTIMATE);
  } else {
    plans_->forward = fftw_plan_dft_r2c_2d(n, n, plans_->real, plans_->spectrum, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_2d(n, n, plans_->spectrum, plans_->real, FFTW_ESTIMATE);
  }
  if (!plans_->forward || !plans_->backward) throw Error("FFT plan creation failed");

  plans_->inverse_symbol.assign(spectral, 0.0);
  if (grid.dim() == 1) {
    for (int k = 1; k < half; ++k)
      plans_->inverse_symbol[k] = 1.0 / (eps0 * laplacian_symbol(k, n, dx) * total);
  } else {
    for (int ky = 0; ky < n; ++ky) {
      const double ly = laplacian_symbol(ky, n, dx);
      for (int kx = 0; kx < half; ++kx) {
        if (kx == 0 && ky == 0) continue;
        const double lambda = laplacian_symbol(kx, n, dx) + ly;
        plans_->inverse_symbol[static_cast<std::size_t>(ky) * half + kx] =
            1.0 / (eps0 * lambda * total);
      }
    }
  }
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

void PoissonSolver::solve_potential(const ScalarField& rho, ScalarField& phi) {
  if (rho.size() != grid_.size()) throw Error("charge density does not conform to the grid");
  std::copy(rho.begin(), rho.end(), plans_->real);
  fftw_execute(plans_->forward);
  for (std::size_t k = 0; k < plans_->inverse_symbol.size(); ++k) {
    plans_->spectrum[k][0] *= plans_->inverse_symbol[k];
    plans_->spectrum[k][1] *= plans_->inverse_symbol[k];
  }
  fftw_execute(plans_->backward);
  phi.assign(plans_->real, plans_->real + grid_.size());
}

PoissonSolution PoissonSolver::solve(const ScalarField& rho) {
  PoissonSolution out;
  solve_potential(rho, out.phi);
  out.e = gradient_to_field(out.phi, grid_);

  const double mean = std::accumulate(rho.begin(), rho.end(), 0.0) / static_cast<double>(rho.size());
  const ScalarField lap = discrete_laplacian(out.phi, grid_);
  for (std::size_t j = 0; j < lap.size(); ++j)
    out.residual = std::max(out.residual, std::abs(lap[j] + (rho[j] - mean) / eps0_));
  return out;
}

PoissonSolution solve_poisson_1d(const ScalarField& rho, const Grid& grid) {
  if (grid.dim() != 1) throw Error("solve_poisson_1d needs a 1D grid");
  return PoissonSolver(grid).solve(rho);
}

PoissonSolution solve_poisson_2d(const ScalarField& rho, const Grid& grid) {
  if (grid.dim() != 2) throw Error("solve_poisson_2d needs a 2D grid");
  return PoissonSolver(grid).solve(rho);
}

ScalarField discrete_laplacian(const ScalarField& phi, const Grid& grid) {
  if (phi.size() != grid.size()) throw Error("potential does not conform to the grid");
  const int n = grid.nodes();
  const double inv = 1.0 / (grid.spacing() * grid.spacing());
  ScalarField out(grid.size());
  if (grid.dim() == 1) {
    for (int j = 0; j < n; ++j)
      out[j] = (phi[grid.wrap_index(j + 1)] - 2.0 * phi[j] + phi[grid.wrap_index(j - 1)]) * inv;
    return out;
  }
  for (int iy = 0; iy < n; ++iy) {
    const int ym = grid.wrap_index(iy - 1);
    const int yp = grid.wrap_index(iy + 1);
    for (int ix = 0; ix < n; ++ix) {
      const int xm = grid.wrap_index(ix - 1);
      const int xp = grid.wrap_index(ix + 1);
      const double c = phi[grid.index(ix, iy)];
      out[grid.index(ix, iy)] = (phi[grid.index(xp, iy)] + phi[grid.index(xm, iy)] +
                                 phi[grid.index(ix, yp)] + phi[grid.index(ix, ym)] - 4.0 * c) *
                                inv;
    }
  }
  return out;
}

void gradient_to_field(const ScalarField& phi, const Grid& grid, VectorField& e) {
  if (phi.size() != grid.size()) throw Error("potential does not conform to the grid");
  const int n = grid.nodes();
  const double scale = -0.5 / grid.spacing();
  e.x.resize(grid.size());
  if (grid.dim() == 1) {
    e.y.clear();
    for (int j = 0; j < n; ++j)
      e.x[j] = scale * (phi[grid.wrap_index(j + 1)] - phi[grid.wrap_index(j - 1)]);
    return;
  }
  e.y.resize(grid.size());
  for (int iy = 0; iy < n; ++iy) {
    const int ym = grid.wrap_index(iy - 1);
    const int yp = grid.wrap_index(iy + 1);
    for (int ix = 0; ix < n; ++ix) {
      const int xm = grid.wrap_index(ix - 1);
      const int xp = grid.wrap_index(ix + 1);
      e.x[grid.index(ix, iy)] = scale * (phi[grid.index(xp, iy)] - phi[grid.index(xm, iy)]);
      e.y[grid.index(ix, iy)] = scale * (phi[grid.index(ix, yp)] - phi[grid.index(ix, ym)]);
    }
  }
}

VectorField gradient_to_field(const ScalarField& phi, const Grid& grid) {
  VectorField e;
  gradient_to_field(phi, grid, e);
  return e;
}

namespace {

// One 1-2-1 pass along x or y of a scalar component. Both loops run over
// contiguous rows.
void binomial_pass(std::vector<double>& a, std::vector<double>& scratch, const Grid& grid,
                   bool along_y) {
  const int n = grid.nodes();
  const int rows = grid.dim() == 1 ? 1 : n;
  scratch.resize(a.size());
  for (int r = 0; r < rows; ++r) {
    double* out = scratch.data() + grid.index(0, r);
    if (along_y) {
      const double* below = a.data() + grid.index(0, grid.wrap_index(r - 1));
      const double* row = a.data() + grid.index(0, r);
      const double* above = a.data() + grid.index(0, grid.wrap_index(r + 1));
      for (int j = 0; j < n; ++j) out[j] = 0.25 * (below[j] + 2.0 * row[j] + above[j]);
    } else {
      const double* row = a.data() + grid.index(0, r);
      out[0] = 0.25 * (row[n - 1] + 2.0 * row[0] + row[1]);
      for (int j = 1; j < n - 1; ++j) out[j] = 0.25 * (row[j - 1] + 2.0 * row[j] + row[j + 1]);
      out[n - 1] = 0.25 * (row[n - 2] + 2.0 * row[n - 1] + row[0]);
    }
  }
  a.swap(scratch);
}

}  // namespace

VectorField filter_field(const VectorField& e, const Grid& grid, int passes) {
  if (passes < 0) throw Error("filter passes must be non-negative");
  if (!e.conforms_to(grid)) throw Error("field array does not conform to the grid");
  VectorField out = e;
  std::vector<double> scratch;
  for (int p = 0; p < passes; ++p) {
    binomial_pass(out.x, scratch, grid, false);
    if (grid.dim() == 2) {
      binomial_pass(out.x, scratch, grid, true);
      binomial_pass(out.y, scratch, grid, false);
      binomial_pass(out.y, scratch, grid, true);
    }
  }
  return out;
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& values,
                     const Grid& grid) {
  if (values.size() != grid.size()) throw Error("field does not conform to the grid");
  if (grid.dim() == 1) {
    CsvWriter csv(path, {"node_index", "value"});
    for (int j = 0; j < grid.nodes(); ++j) {
      csv << j << values[j];
      csv.end_row();
    }
    return;
  }
  CsvWriter csv(path, {"node_index", "node_index_y", "value"});
  for (int iy = 0; iy < grid.nodes(); ++iy)
    for (int ix = 0; ix < grid.nodes(); ++ix) {
      csv << ix << iy << values[grid.index(ix, iy)];
      csv.end_row();
    }
}

}  // namespace piclab
