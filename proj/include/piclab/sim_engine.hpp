// Full PIC runs: initial conditions, the deposit -> solve -> gather -> push
// loop, per-step diagnostics and the explicit-scheme stability checks.

#ifndef PICLAB_SIM_ENGINE_HPP
#define PICLAB_SIM_ENGINE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "piclab/config.hpp"
#include "piclab/domain.hpp"

namespace piclab {

struct DiagnosticRecord {
  int step = 0;
  double time = 0.0;
  double kinetic = 0.0;
  double field = 0.0;
  double total = 0.0;
  double momentum_x = 0.0;
  double momentum_y = 0.0;
  double charge = 0.0;
};

struct Diagnostics {
  int dim = 1;
  std::vector<DiagnosticRecord> records;
};

enum class CriterionStatus { pass, fail, not_applicable };

struct StabilityCriterion {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  CriterionStatus status = CriterionStatus::not_applicable;
  std::string note;
};

struct StabilityReport {
  double plasma_frequency = 0.0;
  /// Zero for cold beams.
  double debye_length = 0.0;
  StabilityCriterion langmuir;  ///< omega_pe dt < 2
  StabilityCriterion debye;     ///< dx <= xi lambda_De
  StabilityCriterion cfl;       ///< c dt / dx <= 1, explicit Maxwell stepping only

  bool all_pass() const;
  std::string to_text() const;
};

struct RunResult {
  ParticleEnsemble final_state;
  Diagnostics diagnostics;
  StabilityReport stability;
  /// rho (particles + background), phi and E at the final positions.
  FieldState fields;
};

/// Weight per macro-particle that yields the configured plasma frequency.
double macro_particle_weight(const SimConfig& config);

/// P/2 particles at +v0 then P/2 at -v0; uniform random positions displaced
/// by amplitude * (L / 2 pi) * sin(2 pi x / L). Throws for odd P.
ParticleEnsemble init_two_stream(int particles, const Grid& grid, double v0, double amplitude,
                                 std::uint64_t seed, double thermal_speed = 0.0);

/// Uniform random positions over the square domain. With beams on, v_x is
/// +v0 for the first half and -v0 for the second, v_y alternates by index.
ParticleEnsemble init_uniform_2d(int particles, const Grid& grid, std::uint64_t seed,
                                 double v0 = 0.0, bool beams = true, double thermal_speed = 0.0);

/// Initial ensemble for the configured model with species and weights set.
ParticleEnsemble initial_conditions(const SimConfig& config);

/// CSV `particle_index,x[,y],vx[,vy]` with round-trippable numbers.
void write_particles_csv(const std::filesystem::path& path, const ParticleEnsemble& particles);
/// Reads positions and velocities; species and weight come from `config`.
ParticleEnsemble read_particles_csv(const std::filesystem::path& path, const SimConfig& config);

/// Reads `path` if it exists, otherwise generates and stores the ensemble.
ParticleEnsemble load_or_create_initial_conditions(const SimConfig& config,
                                                   const std::filesystem::path& path);

StabilityReport stability_check(const SimConfig& config);

struct RunOptions {
  bool record_diagnostics = true;
};

RunResult run(const SimConfig& config, const RunOptions& options = {});
RunResult run(const SimConfig& config, ParticleEnsemble initial, const RunOptions& options = {});

/// Header `step,time,kinetic,field,total,momentum_x[,momentum_y],charge`.
void write_diagnostics_csv(const std::filesystem::path& path, const Diagnostics& diagnostics);

/// Frozen-field electric field E = sin(2 pi x / L) e_x.
Vec3 frozen_electric_field(const Vec3& x, double length);

}  // namespace piclab

#endif  // PICLAB_SIM_ENGINE_HPP
