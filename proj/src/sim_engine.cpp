#include "piclab/sim_engine.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "piclab/csv.hpp"
#include "piclab/deposit_gather.hpp"
#include "piclab/grid_fields.hpp"
#include "piclab/pushers.hpp"

namespace piclab {

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
class Uniform01 {
 public:
  explicit Uniform01(std::uint64_t seed) : gen_(seed) {}
  double operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Box-Muller; only used when a thermal spread is requested.
  double normal() {
    const double u1 = 1.0 - (*this)();
    const double u2 = (*this)();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

double perturbed(double x, double amplitude, double length) {
  const double k = 2.0 * std::numbers::pi / length;
  return wrap_periodic(x + amplitude * std::sin(k * x) / k, length);
}

double domain_volume(const Grid& grid) {
  return grid.dim() == 1 ? grid.length() : grid.length() * grid.length();
}

const char* status_text(CriterionStatus s) {
  switch (s) {
    case CriterionStatus::pass:
      return "pass";
    case CriterionStatus::fail:
      return "FAIL";
    case CriterionStatus::not_applicable:
      return "not applicable";
  }
  return "?";
}

}  // namespace

Vec3 frozen_electric_field(const Vec3& x, double length) {
  return {std::sin(2.0 * std::numbers::pi * x.x / length), 0.0, 0.0};
}

double macro_particle_weight(const SimConfig& config) {
  const Species& s = config.species;
  const double volume = config.dim() == 1 ? config.length : config.length * config.length;
  return config.plasma_frequency * config.plasma_frequency * s.mass * volume /
         (config.particles * s.charge * s.charge);
}

ParticleEnsemble init_two_stream(int particles, const Grid& grid, double v0, double amplitude,
                                 std::uint64_t seed, double thermal_speed) {
  if (particles < 2 || particles % 2 != 0)
    throw Error("two-stream initialization needs an even particle count, got " +
                std::to_string(particles));
  if (grid.dim() != 1) throw Error("two-stream initialization is one-dimensional");
  ParticleEnsemble p;
  p.dim = 1;
  p.x.resize(particles);
  p.v.resize(particles);
  Uniform01 rng(seed);
  const double l = grid.length();
  for (int i = 0; i < particles; ++i) {
    p.x[i].x = perturbed(l * rng(), amplitude, l);
    p.v[i].x = i < particles / 2 ? v0 : -v0;
  }
  if (thermal_speed > 0.0)
    for (auto& v : p.v) v.x += thermal_speed * rng.normal();
  return p;
}

ParticleEnsemble init_uniform_2d(int particles, const Grid& grid, std::uint64_t seed, double v0,
                                 bool beams, double thermal_speed) {
  if (particles < 1) throw Error("need at least one particle");
  if (grid.dim() != 2) throw Error("uniform 2D initialization needs a 2D grid");
  ParticleEnsemble p;
  p.dim = 2;
  p.x.resize(particles);
  p.v.resize(particles);
  Uniform01 rng(seed);
  const double l = grid.length();
  for (int i = 0; i < particles; ++i) {
    p.x[i].x = l * rng();
    p.x[i].y = l * rng();
    if (beams) {
      p.v[i].x = i < (particles + 1) / 2 ? v0 : -v0;
      p.v[i].y = i % 2 == 0 ? v0 : -v0;
    }
  }
  if (thermal_speed > 0.0)
    for (auto& v : p.v) {
      v.x += thermal_speed * rng.normal();
      v.y += thermal_speed * rng.normal();
    }
  return p;
}

ParticleEnsemble initial_conditions(const SimConfig& config) {
  const Grid grid = config.grid();
  ParticleEnsemble p;
  if (config.model == Model::electrostatic_1d) {
    const double v0 = config.beams ? config.v0 : 0.0;
    p = init_two_stream(config.particles, grid, v0, config.perturbation, config.seed,
                        config.thermal_speed);
  } else {
    p = init_uniform_2d(config.particles, grid, config.seed, config.v0, config.beams,
                        config.thermal_speed);
    for (auto& x : p.x) {
      x.x = perturbed(x.x, config.perturbation, config.length);
      x.y = perturbed(x.y, config.perturbation, config.length);
    }
  }
  p.species = config.species;
  p.weight = macro_particle_weight(config);
  return p;
}

void write_particles_csv(const std::filesystem::path& path, const ParticleEnsemble& particles) {
  if (particles.dim == 1) {
    CsvWriter csv(path, {"particle_index", "x", "vx"});
    for (std::size_t i = 0; i < particles.size(); ++i) {
      csv << static_cast<long long>(i) << particles.x[i].x << particles.v[i].x;
      csv.end_row();
    }
    return;
  }
  CsvWriter csv(path, {"particle_index", "x", "y", "vx", "vy"});
  for (std::size_t i = 0; i < particles.size(); ++i) {
    csv << static_cast<long long>(i) << particles.x[i].x << particles.x[i].y << particles.v[i].x
        << particles.v[i].y;
    csv.end_row();
  }
}

ParticleEnsemble read_particles_csv(const std::filesystem::path& path, const SimConfig& config) {
  const CsvTable table = read_csv(path);
  const int dim = config.dim();
  const std::vector<std::string> expected =
      dim == 1 ? std::vector<std::string>{"particle_index", "x", "vx"}
               : std::vector<std::string>{"particle_index", "x", "y", "vx", "vy"};
  if (table.header != expected)
    throw Error("'" + path.string() + "' does not hold a " + std::to_string(dim) +
                "D particle table");
  if (table.rows.size() != static_cast<std::size_t>(config.particles))
    throw Error("'" + path.string() + "' holds " + std::to_string(table.rows.size()) +
                " particles, config expects " + std::to_string(config.particles));
  ParticleEnsemble p;
  p.dim = dim;
  p.species = config.species;
  p.weight = macro_particle_weight(config);
  p.x.resize(table.rows.size());
  p.v.resize(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (dim == 1) {
      p.x[i].x = parse_double(row[1]);
      p.v[i].x = parse_double(row[2]);
    } else {
      p.x[i] = {parse_double(row[1]), parse_double(row[2]), 0.0};
      p.v[i] = {parse_double(row[3]), parse_double(row[4]), 0.0};
    }
  }
  return p;
}

ParticleEnsemble load_or_create_initial_conditions(const SimConfig& config,
                                                   const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) return read_particles_csv(path, config);
  ParticleEnsemble p = initial_conditions(config);
  write_particles_csv(path, p);
  return p;
}

bool StabilityReport::all_pass() const {
  return langmuir.status != CriterionStatus::fail && debye.status != CriterionStatus::fail &&
         cfl.status != CriterionStatus::fail;
}

std::string StabilityReport::to_text() const {
  std::ostringstream out;
  out.precision(6);
  out << "plasma frequency omega_pe = " << plasma_frequency << '\n';
  for (const auto* c : {&langmuir, &debye, &cfl}) {
    out << c->name << ": ";
    if (c->status == CriterionStatus::not_applicable) {
      out << "not applicable";
      if (!c->note.empty()) out << " (" << c->note << ')';
    } else {
      out << c->value << " (limit " << c->limit << ") " << status_text(c->status);
      if (!c->note.empty()) out << " - " << c->note;
    }
    out << '\n';
  }
  out << (all_pass() ? "all applicable criteria pass" : "stability warning") << '\n';
  return out.str();
}

StabilityReport stability_check(const SimConfig& config) {
  StabilityReport r;
  const Species& s = config.species;
  const double volume = config.dim() == 1 ? config.length : config.length * config.length;
  const double density = config.particles * macro_particle_weight(config) / volume;
  const double eps0 = 1.0;
  r.plasma_frequency = std::sqrt(density * s.charge * s.charge / (eps0 * s.mass));

  r.langmuir.name = "Langmuir (omega_pe dt < 2)";
  r.langmuir.value = r.plasma_frequency * config.dt;
  r.langmuir.limit = 2.0;
  r.langmuir.status = r.langmuir.value < 2.0 ? CriterionStatus::pass : CriterionStatus::fail;

  const double dx = config.length / config.nodes;
  const double xi = 1.0;
  r.debye.name = "Debye (dx <= xi lambda_De)";
  r.debye.limit = xi;
  if (config.thermal_speed > 0.0) {
    r.debye_length = config.thermal_speed / r.plasma_frequency;
    r.debye.value = dx / r.debye_length;
    r.debye.status = r.debye.value <= xi ? CriterionStatus::pass : CriterionStatus::fail;
  } else {
    r.debye.note = "cold beams, thermal speed 0";
  }

  r.cfl.name = "CFL (c dt / dx <= 1)";
  r.cfl.limit = 1.0;
  if (!config.theta) {
    r.cfl.note = "no Maxwell field stepping";
  } else if (*config.theta >= 0.5) {
    r.cfl.value = config.dt / dx;
    r.cfl.note = "implicit";
  } else {
    r.cfl.value = config.dt / dx;
    r.cfl.status = r.cfl.value <= 1.0 ? CriterionStatus::pass : CriterionStatus::fail;
  }
  return r;
}

namespace {

class FieldPipeline {
 public:
  FieldPipeline(const SimConfig& config, const ParticleEnsemble& particles)
      : config_(config),
        grid_(config.grid()),
        solver_(grid_),
        background_(-particles.particle_charge() * static_cast<double>(particles.size()) /
                    domain_volume(grid_)) {}

  const Grid& grid() const { return grid_; }

  /// Solves for the fields of `particles`; returns the deposited particle charge.
  double solve(const ParticleEnsemble& particles, FieldState& out) {
    out.rho = deposit_charge(particles, grid_, config_.shape_order);
    double charge = 0.0;
    for (double& r : out.rho) {
      charge += r;
      r += background_;
    }
    solver_.solve_potential(out.rho, out.phi);
    gradient_to_field(out.phi, grid_, out.e);
    out.b_z = config_.b;
    return charge * grid_.cell_volume();
  }

 private:
  const SimConfig& config_;
  Grid grid_;
  PoissonSolver solver_;
  double background_;
};

DiagnosticRecord measure(const ParticleEnsemble& p, const FieldState& f, const Grid& grid,
                         int step, double time, double charge) {
  DiagnosticRecord r;
  r.step = step;
  r.time = time;
  const double m = p.particle_mass();
  for (const auto& v : p.v) {
    r.kinetic += 0.5 * m * dot(v, v);
    r.momentum_x += m * v.x;
    r.momentum_y += m * v.y;
  }
  double e2 = 0.0;
  for (double e : f.e.x) e2 += e * e;
  for (double e : f.e.y) e2 += e * e;
  r.field = 0.5 * e2 * grid.cell_volume();
  r.total = r.kinetic + r.field;
  r.charge = charge;
  return r;
}

void frozen_fields(const Grid& grid, double b_z, FieldState& out) {
  out.rho.assign(grid.size(), 0.0);
  out.phi.assign(grid.size(), 0.0);
  out.e = VectorField::zeros(grid);
  for (int iy = 0; iy < (grid.dim() == 1 ? 1 : grid.nodes()); ++iy)
    for (int ix = 0; ix < grid.nodes(); ++ix)
      out.e.x[grid.index(ix, iy)] =
          frozen_electric_field({grid.node_position(ix), 0.0, 0.0}, grid.length()).x;
  out.b_z = b_z;
}

}  // namespace

RunResult run(const SimConfig& config, const RunOptions& options) {
  config.validate();
  return run(config, initial_conditions(config), options);
}

RunResult run(const SimConfig& config, ParticleEnsemble p, const RunOptions& options) {
  config.validate();
  if (p.dim != config.dim()) throw Error("initial ensemble dimension does not match the model");
  if (p.size() == 0) throw Error("initial ensemble is empty");
  wrap_positions(p, config.length);

  RunResult result;
  result.stability = stability_check(config);
  result.diagnostics.dim = config.dim();

  FieldPipeline pipeline(config, p);
  const Grid& grid = pipeline.grid();
  const StepScheme scheme = StepScheme::from_config(config);
  const Species& species = p.species;
  const double dt = config.dt;
  const double b = config.b;
  const bool filtered = config.pusher == PusherKind::boris_filter;
  const std::size_t n = p.size();

  const FieldAccessor frozen(
      [length = config.length](const Vec3& x) { return frozen_electric_field(x, length); }, b);

  ParticleEnsemble scratch = p;
  FieldState step_fields;
  FieldState next_fields;
  VectorField averaged;

  const auto push_all = [&](const FieldAccessor& fields, const ParticleEnsemble& from,
                            ParticleEnsemble& to) {
    for (std::size_t i = 0; i < n; ++i) {
      const PhaseState s = push(scheme, {from.x[i], from.v[i]}, dt, fields, species);
      to.x[i] = wrap_periodic(s.x, config.length, p.dim);
      to.v[i] = s.v;
    }
  };
  const auto maybe_filter = [&](FieldState& f) {
    if (filtered) f.e = filter_field(f.e, grid, config.filter_passes);
  };

  const auto record = [&](int step) {
    double charge = 0.0;
    if (config.frozen_field) {
      frozen_fields(grid, b, result.fields);
      for (double r : deposit_charge(p, grid, config.shape_order)) charge += r;
      charge *= grid.cell_volume();
    } else {
      charge = pipeline.solve(p, result.fields);
    }
    result.diagnostics.records.push_back(measure(p, result.fields, grid, step, step * dt, charge));
  };

  if (options.record_diagnostics) record(0);
  for (int step = 1; step <= config.steps; ++step) {
    if (config.frozen_field) {
      push_all(frozen, p, p);
    } else {
      for (std::size_t i = 0; i < n; ++i)
        scratch.x[i] = wrap_periodic(
            field_sample_position(scheme, {p.x[i], p.v[i]}, dt, b, species), config.length,
            p.dim);
      pipeline.solve(scratch, step_fields);
      maybe_filter(step_fields);
      const auto fields = FieldAccessor::gathered(grid, step_fields.e, config.shape_order, b);
      if (!config.time_averaged_gather) {
        push_all(fields, p, p);
      } else {
        // Predictor with E^n, then a single corrector with (E^n + E^{n+1}) / 2.
        push_all(fields, p, scratch);
        pipeline.solve(scratch, next_fields);
        maybe_filter(next_fields);
        averaged = step_fields.e;
        for (std::size_t j = 0; j < averaged.x.size(); ++j)
          averaged.x[j] = 0.5 * (step_fields.e.x[j] + next_fields.e.x[j]);
        for (std::size_t j = 0; j < averaged.y.size(); ++j)
          averaged.y[j] = 0.5 * (step_fields.e.y[j] + next_fields.e.y[j]);
        push_all(FieldAccessor::gathered(grid, averaged, config.shape_order, b), p, p);
      }
    }

    if (options.record_diagnostics) record(step);
  }

  if (!options.record_diagnostics) {
    if (config.frozen_field)
      frozen_fields(grid, b, result.fields);
    else
      pipeline.solve(p, result.fields);
  }
  result.final_state = std::move(p);
  return result;
}

void write_diagnostics_csv(const std::filesystem::path& path, const Diagnostics& diagnostics) {
  std::vector<std::string> header{"step", "time", "kinetic", "field", "total", "momentum_x"};
  if (diagnostics.dim == 2) header.push_back("momentum_y");
  header.push_back("charge");
  CsvWriter csv(path, header);
  for (const auto& r : diagnostics.records) {
    csv << r.step << r.time << r.kinetic << r.field << r.total << r.momentum_x;
    if (diagnostics.dim == 2) csv << r.momentum_y;
    csv << r.charge;
    csv.end_row();
  }
}

}  // namespace piclab
