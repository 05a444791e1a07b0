#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "piclab/maxwell_theta.hpp"

using namespace piclab;
using std::numbers::pi;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("zero and uniform states are fixed points") {
  const Grid g(2, 16, 1.0);
  EMState s(g);
  const VectorField j = VectorField::zeros(g);
  maxwell_theta_step(s, j, 0.1, 0.5);
  CHECK(max_abs(s.e.x) == 0.0);
  CHECK(max_abs(s.b_z) == 0.0);

  EMState u(g);
  std::fill(u.b_z.begin(), u.b_z.end(), 2.0);
  maxwell_theta_step(u, j, 0.1, 0.5);
  CHECK(max_abs(u.e.x) < 1e-14);
  CHECK(max_abs(u.e.y) < 1e-14);
  for (double b : u.b_z) CHECK(b == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("energy functional") {
  const Grid g(2, 8, 1.0);
  EMState s(g);
  CHECK(em_energy(s) == 0.0);
  std::fill(s.e.x.begin(), s.e.x.end(), 1.0);
  CHECK(em_energy(s) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(em_energy(plane_wave(g)) > 0.0);
}

TEST_CASE("curl_b is the adjoint of curl_e") {
  const Grid g(2, 8, 1.0);
  VectorField e = VectorField::zeros(g);
  ScalarField b(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    e.x[k] = std::sin(0.3 * k);
    e.y[k] = std::cos(0.7 * k);
    b[k] = std::sin(1.1 * k + 0.2);
  }
  const auto ce = curl_e(e, g);
  const auto cb = curl_b(b, g);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    lhs += ce[k] * b[k];
    rhs += e.x[k] * cb.x[k] + e.y[k] * cb.y[k];
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("Crank-Nicolson conserves energy beyond the explicit limit") {
  const Grid g(2, 32, 1.0);
  EMState s = plane_wave(g);
  const VectorField j = VectorField::zeros(g);
  const double dt = 4.0 * g.spacing();
  const double e0 = em_energy(s);
  for (int n = 0; n < 1000; ++n) maxwell_theta_step(s, j, dt, 0.5);
  CHECK(std::abs(em_energy(s) - e0) / e0 <= 1e-9);
}

TEST_CASE("backward Euler strictly dissipates") {
  const Grid g(2, 16, 1.0);
  EMState s = plane_wave(g);
  const VectorField j = VectorField::zeros(g);
  double prev = em_energy(s);
  for (int n = 0; n < 50; ++n) {
    maxwell_theta_step(s, j, 2.0 * g.spacing(), 1.0);
    const double now = em_energy(s);
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("large time steps stay bounded") {
  const Grid g(2, 16, 1.0);
  EMState s = plane_wave(g, 2);
  const VectorField j = VectorField::zeros(g);
  for (int n = 0; n < 1000; ++n) maxwell_theta_step(s, j, 8.0 * g.spacing(), 0.5);
  CHECK(max_abs(s.e.y) <= 1.0 + 1e-8);
}

TEST_CASE("plane wave follows the semi-discrete dispersion relation") {
  const Grid g(2, 32, 1.0);
  const double k = 2 * pi;
  const double kappa = std::sin(k * g.spacing()) / g.spacing();
  EMState s = plane_wave(g);
  const VectorField j = VectorField::zeros(g);
  const double dt = 1e-3;
  for (int n = 0; n < 100; ++n) maxwell_theta_step(s, j, dt, 0.5);
  const double t = s.time;
  CHECK(t == doctest::Approx(0.1));
  double err = 0.0;
  for (int i = 0; i < 32; ++i) err = std::max(err, std::abs(s.e.y[g.index(i, 3)] - std::cos(k * g.node_position(i) - kappa * t)));
  CHECK(err < 1e-5);
}

TEST_CASE("a prescribed current drives the electric field") {
  const Grid g(2, 8, 1.0);
  EMState s(g);
  VectorField j = VectorField::zeros(g);
  std::fill(j.x.begin(), j.x.end(), 1.0);
  maxwell_theta_step(s, j, 0.1, 0.5);
  for (double ex : s.e.x) CHECK(ex == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("argument validation") {
  const Grid g(2, 8, 1.0);
  EMState s(g);
  const VectorField j = VectorField::zeros(g);
  CHECK_THROWS_AS(maxwell_theta_step(s, j, 0.1, 1.5), Error);
  CHECK_THROWS_AS(maxwell_theta_step(s, j, -0.1, 0.5), Error);
  CHECK_THROWS_AS(EMState(Grid(1, 8, 1.0)), Error);
  ThetaSolveOptions tight;
  tight.max_iters = 1;
  tight.rel_tol = 1e-16;
  EMState w = plane_wave(g);
  CHECK_THROWS_AS(maxwell_theta_step(w, j, 1.0, 0.5, tight), ConvergenceError);
}

TEST_CASE("divergence diagnostic") {
  const Grid g(2, 8, 1.0);
  EMState s = plane_wave(g);
  CHECK(divergence_error(s, ScalarField(g.size(), 0.0)) < 1e-12);
  EMState z(g);
  CHECK(divergence_error(z, ScalarField(g.size(), 0.5)) == doctest::Approx(0.5));
}
