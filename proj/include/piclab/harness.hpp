// Convergence studies and runtime benchmarks.
//
// Errors compare final particle positions of two runs that started from the
// same initial ensemble, using minimal-image differences on the periodic axes.

#ifndef PICLAB_HARNESS_HPP
#define PICLAB_HARNESS_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "piclab/config.hpp"
#include "piclab/domain.hpp"

namespace piclab {

/// max_p |a_p - b_p| with minimal-image differences on the first `dim` axes.
double err_max(std::span<const Vec3> a, std::span<const Vec3> b, double length, int dim);

/// (sum_p dx |a_p - b_p|^2)^(1/2), minimal image as in err_max.
double err_l2(std::span<const Vec3> a, std::span<const Vec3> b, double dx, double length,
              int dim);

/// log(err_fine / err_coarse) / log(0.5). Empty unless both errors are positive.
std::optional<double> conv_rate(double err_coarse, double err_fine);

/// Final positions of `config` run from `initial` with dt / divisor and
/// steps * divisor (same final time). Diagnostics are skipped.
std::vector<Vec3> final_positions(const SimConfig& config, const ParticleEnsemble& initial,
                                  int divisor = 1);

struct ReferenceSolution {
  int fine_divisor = 0;
  std::vector<Vec3> positions;       ///< Euler at dt / fine_divisor
  std::vector<Vec3> positions_half;  ///< Euler at dt / (2 fine_divisor)
  /// max_p |x_ref(dt_fine) - x_ref(dt_fine / 2)|
  double residual = 0.0;
  /// max_p |x_method(dt) - x_ref(dt_fine / 2)| for the configured pusher.
  double bound = 0.0;
  bool certified() const { return residual <= bound; }
};

/// Builds the Euler reference and its certificate without judging it.
/// `reference_pusher` exists for cross-validation runs only.
ReferenceSolution certify_reference(const SimConfig& config, const ParticleEnsemble& initial,
                                    int fine_divisor,
                                    PusherKind reference_pusher = PusherKind::euler);

/// certify_reference, throwing if the certificate fails.
ReferenceSolution make_reference(const SimConfig& config, const ParticleEnsemble& initial,
                                 int fine_divisor);

struct TableauOptions {
  /// Spatial levels NG, 2 NG, ..., 2^(dx_levels-1) NG.
  int dx_levels = 5;
  /// Temporal levels dt, dt/2, ..., dt/2^(dt_levels-1).
  int dt_levels = 12;
};

struct ConvergenceTableau {
  PusherKind method = PusherKind::euler;
  NormKind norm = NormKind::max;
  std::vector<int> nodes;   ///< NG per spatial level
  std::vector<double> dts;  ///< dt per temporal level
  /// errors[dx_level][dt_level]
  std::vector<std::vector<double>> errors;

  /// Rate from dt level t-1 to t (empty for t = 0 or undefined).
  std::optional<double> rate_dt(std::size_t dx_level, std::size_t dt_level) const;
  std::optional<double> rate_dx(std::size_t dx_level, std::size_t dt_level) const;
  /// Mean over the temporal axis for each spatial level.
  std::vector<double> mean_over_dt() const;
};

/// Runs `method` at every (NG level, dt level) pair from `initial` and measures
/// it against `reference` (final positions on the finest grid).
ConvergenceTableau build_tableau(const SimConfig& config, const ParticleEnsemble& initial,
                                 PusherKind method, NormKind norm,
                                 std::span<const Vec3> reference, const TableauOptions& options);

/// CSV `dx_level,dt_level,error,rate_dt,rate_dx`.
void write_tableau_csv(const std::filesystem::path& path, const ConvergenceTableau& tableau);
/// CSV `dx_level,NG,mean_error`.
void write_dx_average_csv(const std::filesystem::path& path, const ConvergenceTableau& tableau);

struct BenchRow {
  PusherKind method;
  int nodes;
  double dt;
  int steps;
  double median_seconds;
};

/// Median of three timed runs per (method, NG) after one warm-up run, with the
/// repetitions interleaved across methods within each NG.
/// Rows are sorted by (method name, NG).
std::vector<BenchRow> runtime_bench(const SimConfig& base, std::span<const PusherKind> methods,
                                    std::span<const int> grid_sizes, double dt, int steps);

/// CSV `method,NG,dt,steps,median_seconds`.
void write_bench_csv(const std::filesystem::path& path, std::span<const BenchRow> rows);

}  // namespace piclab

#endif  // PICLAB_HARNESS_HPP
