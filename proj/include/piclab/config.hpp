#ifndef PICLAB_CONFIG_HPP
#define PICLAB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "piclab/domain.hpp"

namespace piclab {

/// How the Boris-EM magnetic substep is evaluated.
enum class MagneticSubstep {
  rotation,  ///< norm-preserving rotation by -Omega dt (half-angle tangent form)
  literal,   ///< v* = v + (q dt / m) v x B, not a rotation
};

/// Full experiment description. The file-backed keys are listed in
/// `config_keys()`; the remaining members are library-level knobs.
struct SimConfig {
  Model model = Model::electrostatic_1d;
  PusherKind pusher = PusherKind::boris_es;
  int nodes = 32;
  double length = 2.0 * std::numbers::pi;
  int particles = 10000;
  double dt = 0.2;
  int steps = 100;
  std::uint64_t seed = 1;
  double b = 0.0;
  double v0 = 0.2;
  double perturbation = 1e-3;
  int filter_passes = 1;
  ShapeOrder shape_order = ShapeOrder::cic;
  int fine_divisor = 2048;
  NormKind norm = NormKind::max;
  bool frozen_field = false;
  std::optional<double> theta;

  // Library-level knobs (not config-file keys).
  Species species{-1.0, 1.0};
  /// Macro-particle weights are chosen so the plasma frequency equals this.
  double plasma_frequency = 1.0;
  /// Gaussian thermal spread added to the beams; zero gives cold beams.
  double thermal_speed = 0.0;
  /// Counter-streaming beams on/off; off starts every particle at rest.
  bool beams = true;
  MagneticSubstep magnetic_substep = MagneticSubstep::rotation;
  /// One-pass predictor-corrector using the (E^n + E^{n+1})/2 gather.
  bool time_averaged_gather = false;
  double implicit_tol = 1e-12;
  int implicit_max_iters = 50;

  int dim() const { return model_dimension(model); }
  Grid grid() const { return Grid(dim(), nodes, length); }
  /// Throws Error naming the violated constraint.
  void validate() const;
};

/// The exhaustive list of keys accepted in config files.
std::span<const std::string_view> config_keys();

/// Applies one `key = value` assignment. Unknown keys are errors.
void apply_setting(SimConfig& config, std::string_view key, std::string_view value);

/// Applies a `key=value` override string.
void apply_override(SimConfig& config, std::string_view assignment);

/// Parses the flat `key = value` format (`#` starts a comment).
/// Does not validate; call `SimConfig::validate` once overrides are applied.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

}  // namespace piclab

#endif  // PICLAB_CONFIG_HPP
