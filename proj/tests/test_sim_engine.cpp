#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "piclab/pushers.hpp"
#include "piclab/sim_engine.hpp"

using namespace piclab;
namespace fs = std::filesystem;

namespace {

SimConfig small_two_stream() {
  SimConfig c;
  c.particles = 1000;
  c.steps = 50;
  c.nodes = 32;
  return c;
}

fs::path temp_file(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "piclab_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("two-stream beams") {
  const Grid g(1, 16, 1.0);
  const auto p = init_two_stream(4, g, 0.2, 0.0, 5);
  REQUIRE(p.size() == 4);
  CHECK(p.v[0].x == 0.2);
  CHECK(p.v[1].x == 0.2);
  CHECK(p.v[2].x == -0.2);
  CHECK(p.v[3].x == -0.2);
  double mean = 0.0;
  for (const auto& v : p.v) mean += v.x;
  CHECK(mean == 0.0);
  for (const auto& x : p.x) {
    CHECK(x.x >= 0.0);
    CHECK(x.x < 1.0);
  }
  CHECK_THROWS_AS(init_two_stream(5, g, 0.2, 0.0, 5), Error);
}

TEST_CASE("initialization is deterministic per seed") {
  const Grid g(1, 16, 1.0);
  const auto a = init_two_stream(100, g, 0.2, 1e-3, 9);
  const auto b = init_two_stream(100, g, 0.2, 1e-3, 9);
  const auto c = init_two_stream(100, g, 0.2, 1e-3, 10);
  CHECK(a.x == b.x);
  CHECK(a.v == b.v);
  CHECK(a.x != c.x);
  const Grid g2(2, 16, 1.0);
  CHECK(init_uniform_2d(50, g2, 3).x == init_uniform_2d(50, g2, 3).x);
}

TEST_CASE("uniform 2D positions are statistically centred") {
  const Grid g(2, 16, 2.0);
  const auto p = init_uniform_2d(10000, g, 17, 0.0, false);
  double mx = 0.0, my = 0.0;
  for (const auto& x : p.x) {
    mx += x.x;
    my += x.y;
  }
  mx /= 10000.0;
  my /= 10000.0;
  // Standard deviation of a uniform sample mean: L / sqrt(12 P).
  const double sigma = 2.0 / std::sqrt(12.0 * 10000.0);
  CHECK(std::abs(mx - 1.0) < 3.0 * sigma);
  CHECK(std::abs(my - 1.0) < 3.0 * sigma);
  for (const auto& v : p.v) CHECK(v == Vec3{});
}

TEST_CASE("particle files round-trip bit-exactly") {
  for (auto model : {Model::electrostatic_1d, Model::magnetized_2d}) {
    SimConfig c;
    c.model = model;
    c.pusher = model == Model::magnetized_2d ? PusherKind::boris_em : PusherKind::boris_es;
    c.particles = 64;
    const auto p = initial_conditions(c);
    const auto path = temp_file(model == Model::magnetized_2d ? "p2.csv" : "p1.csv");
    fs::remove(path);
    const auto created = load_or_create_initial_conditions(c, path);
    CHECK(created.x == p.x);
    const auto loaded = load_or_create_initial_conditions(c, path);
    CHECK(loaded.x == p.x);
    CHECK(loaded.v == p.v);
    CHECK(loaded.weight == p.weight);

    SimConfig wrong = c;
    wrong.particles = 32;
    CHECK_THROWS_AS(read_particles_csv(path, wrong), Error);
  }
}

TEST_CASE("macro-particle weight sets the plasma frequency") {
  SimConfig c;
  c.particles = 500;
  c.length = 3.0;
  const double w = macro_particle_weight(c);
  const double density = c.particles * w / c.length;
  CHECK(std::sqrt(density) == doctest::Approx(1.0));
  CHECK(stability_check(c).plasma_frequency == doctest::Approx(1.0));
}

TEST_CASE("stability report") {
  SimConfig c;
  c.dt = 0.1;
  auto r = stability_check(c);
  CHECK(r.all_pass());
  CHECK(r.langmuir.status == CriterionStatus::pass);
  CHECK(r.debye.status == CriterionStatus::not_applicable);
  CHECK(r.to_text().find("not applicable") != std::string::npos);

  c.dt = 2.5;
  r = stability_check(c);
  CHECK_FALSE(r.all_pass());
  CHECK(r.langmuir.status == CriterionStatus::fail);
  CHECK(r.to_text().find("Langmuir") != std::string::npos);

  c.dt = 0.1;
  c.thermal_speed = 0.01;
  r = stability_check(c);
  CHECK(r.debye.status == CriterionStatus::fail);
  c.thermal_speed = 1.0;
  CHECK(stability_check(c).debye.status == CriterionStatus::pass);

  SimConfig m;
  m.model = Model::magnetized_2d;
  m.nodes = 32;
  m.length = 1.0;
  m.dt = 4.0 / 32;
  m.theta = 0.5;
  r = stability_check(m);
  CHECK(r.cfl.status == CriterionStatus::not_applicable);
  CHECK(r.to_text().find("not applicable (implicit)") != std::string::npos);
  m.theta = 0.0;
  CHECK(stability_check(m).cfl.status == CriterionStatus::fail);
}

TEST_CASE("neutral plasma at rest stays at rest") {
  SimConfig c;
  c.particles = 64;
  c.nodes = 16;
  c.steps = 20;
  c.beams = false;
  c.perturbation = 0.0;
  ParticleEnsemble p = initial_conditions(c);
  // Exactly one particle per node: the deposited density is uniform.
  for (int i = 0; i < 64; ++i) p.x[i].x = (i % 16) * c.length / 16;
  const auto r = run(c, p);
  CHECK(r.diagnostics.records.size() == 21);
  for (const auto& rec : r.diagnostics.records) {
    CHECK(rec.kinetic < 1e-28);
    CHECK(rec.field < 1e-28);
  }
  for (int i = 0; i < 64; ++i) CHECK(std::abs(r.final_state.x[i].x - p.x[i].x) < 1e-12);
}

TEST_CASE("two-stream run conserves charge and momentum") {
  const SimConfig c = small_two_stream();
  for (auto pusher : {PusherKind::euler, PusherKind::boris_es}) {
    SimConfig cc = c;
    cc.pusher = pusher;
    const auto r = run(cc);
    const auto& recs = r.diagnostics.records;
    REQUIRE(recs.size() == 51);
    const double q0 = recs.front().charge;
    CHECK(q0 == doctest::Approx(-c.length));
    const double p_scale = cc.particles * macro_particle_weight(cc) * cc.v0;
    for (const auto& rec : recs) {
      CHECK(std::abs(rec.charge - q0) <= 1e-12 * std::abs(q0));
      CHECK(std::abs(rec.momentum_x) <= 1e-10 * p_scale);
    }
  }
}

TEST_CASE("two-stream field energy grows in the linear phase") {
  SimConfig c;
  c.particles = 20000;
  c.nodes = 64;
  c.length = 2 * std::numbers::pi / 3.06;
  c.perturbation = 1e-2;
  c.steps = 150;
  c.dt = 0.1;
  const auto r = run(c);
  const auto& recs = r.diagnostics.records;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < recs.size(); ++i)
    if (recs[i].field > recs[peak].field) peak = i;
  CHECK(recs[peak].field > 100.0 * recs.front().field);
  CHECK(peak > 10);
}

TEST_CASE("single particle in a magnetic field follows the Larmor circle") {
  SimConfig c;
  c.model = Model::magnetized_2d;
  c.pusher = PusherKind::cyclotronic;
  c.b = 1.0;
  c.particles = 1;
  c.nodes = 32;
  c.dt = 0.1;
  c.steps = 60;
  ParticleEnsemble p;
  p.dim = 2;
  p.species = c.species;
  p.weight = macro_particle_weight(c) * 1e-6;
  p.x = {{3.0, 3.0, 0}};
  p.v = {{0.5, 0.0, 0}};
  const auto r = run(c, p);
  const double omega = gyrofrequency(c.species, c.b);
  const double t = c.steps * c.dt;
  const Vec3 v = rotate_clockwise(p.v[0], omega * t);
  const Vec3 centre{p.x[0].x + p.v[0].y / omega, p.x[0].y - p.v[0].x / omega, 0};
  const Vec3 x{centre.x - v.y / omega, centre.y + v.x / omega, 0};
  CHECK(norm(r.final_state.x[0] - x) < 1e-6);
}

TEST_CASE("runs are deterministic") {
  SimConfig c = small_two_stream();
  c.steps = 20;
  const auto a = run(c);
  const auto b = run(c);
  CHECK(a.final_state.x == b.final_state.x);
  for (std::size_t i = 0; i < a.diagnostics.records.size(); ++i)
    CHECK(a.diagnostics.records[i].total == b.diagnostics.records[i].total);
}

TEST_CASE("all pushers run in their model") {
  SimConfig c;
  c.particles = 200;
  c.steps = 5;
  for (auto k : {PusherKind::euler, PusherKind::boris_es, PusherKind::boris_filter, PusherKind::implicit_boris}) {
    c.pusher = k;
    CHECK_NOTHROW(run(c));
  }
  c.model = Model::magnetized_2d;
  c.b = 1.0;
  c.nodes = 16;
  for (auto k : {PusherKind::euler, PusherKind::boris_em, PusherKind::boris_filter,
                 PusherKind::cyclotronic, PusherKind::implicit_boris}) {
    c.pusher = k;
    CHECK_NOTHROW(run(c));
  }
  c.pusher = PusherKind::boris_em;
  c.time_averaged_gather = true;
  CHECK_NOTHROW(run(c));
}

TEST_CASE("boris drifts less in total energy than euler") {
  SimConfig c = small_two_stream();
  c.particles = 4000;
  c.steps = 500;
  c.pusher = PusherKind::euler;
  const auto e = run(c);
  c.pusher = PusherKind::boris_es;
  const auto b = run(c);
  const auto drift = [](const RunResult& r) {
    const auto& recs = r.diagnostics.records;
    return std::abs(recs.back().total - recs.front().total);
  };
  CHECK(drift(b) <= drift(e));
}

TEST_CASE("diagnostics CSV header") {
  SimConfig c = small_two_stream();
  c.steps = 2;
  const auto r = run(c);
  const auto path = temp_file("diag.csv");
  write_diagnostics_csv(path, r.diagnostics);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "step,time,kinetic,field,total,momentum_x,charge");
}
