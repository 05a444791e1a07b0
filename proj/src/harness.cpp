#include "piclab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "piclab/csv.hpp"
#include "piclab/sim_engine.hpp"

namespace piclab {

namespace {

double minimal_image(double d, double length) { return d - length * std::round(d / length); }

double squared_distance(const Vec3& a, const Vec3& b, double length, int dim) {
  const double dx = minimal_image(a.x - b.x, length);
  const double dy = dim == 2 ? minimal_image(a.y - b.y, length) : 0.0;
  return dx * dx + dy * dy;
}

void check_matched(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size())
    throw Error("trajectory particle counts differ (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
}

}  // namespace

double err_max(std::span<const Vec3> a, std::span<const Vec3> b, double length, int dim) {
  check_matched(a, b);
  double worst = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p)
    worst = std::max(worst, squared_distance(a[p], b[p], length, dim));
  return std::sqrt(worst);
}

double err_l2(std::span<const Vec3> a, std::span<const Vec3> b, double dx, double length,
              int dim) {
  check_matched(a, b);
  double sum = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) sum += dx * squared_distance(a[p], b[p], length, dim);
  return std::sqrt(sum);
}

std::optional<double> conv_rate(double err_coarse, double err_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0)) return std::nullopt;
  return std::log(err_fine / err_coarse) / std::log(0.5);
}

std::vector<Vec3> final_positions(const SimConfig& config, const ParticleEnsemble& initial,
                                  int divisor) {
  SimConfig c = config;
  c.dt = config.dt / divisor;
  c.steps = config.steps * divisor;
  return run(c, initial, RunOptions{.record_diagnostics = false}).final_state.x;
}

ReferenceSolution certify_reference(const SimConfig& config, const ParticleEnsemble& initial,
                                    int fine_divisor, PusherKind reference_pusher) {
  if (fine_divisor < 1 || (fine_divisor & (fine_divisor - 1)) != 0)
    throw Error("fine_divisor must be a power of two");
  SimConfig ref = config;
  ref.pusher = reference_pusher;
  ReferenceSolution out;
  out.fine_divisor = fine_divisor;
  out.positions = final_positions(ref, initial, fine_divisor);
  out.positions_half = final_positions(ref, initial, 2 * fine_divisor);
  const auto method = final_positions(config, initial, 1);
  out.residual = err_max(out.positions, out.positions_half, config.length, config.dim());
  out.bound = err_max(method, out.positions_half, config.length, config.dim());
  return out;
}

ReferenceSolution make_reference(const SimConfig& config, const ParticleEnsemble& initial,
                                 int fine_divisor) {
  auto out = certify_reference(config, initial, fine_divisor);
  if (!out.certified())
    throw Error("reference at dt/" + std::to_string(fine_divisor) +
                " is not converged: |x_ref - x_ref/2| = " + format_double(out.residual) +
                " exceeds the method error " + format_double(out.bound) +
                "; increase fine_divisor");
  return out;
}

std::optional<double> ConvergenceTableau::rate_dt(std::size_t i, std::size_t t) const {
  if (t == 0) return std::nullopt;
  return conv_rate(errors[i][t - 1], errors[i][t]);
}

std::optional<double> ConvergenceTableau::rate_dx(std::size_t i, std::size_t t) const {
  if (i == 0) return std::nullopt;
  return conv_rate(errors[i - 1][t], errors[i][t]);
}

std::vector<double> ConvergenceTableau::mean_over_dt() const {
  std::vector<double> out;
  for (const auto& row : errors) {
    double s = 0.0;
    for (double e : row) s += e;
    out.push_back(row.empty() ? 0.0 : s / static_cast<double>(row.size()));
  }
  return out;
}

ConvergenceTableau build_tableau(const SimConfig& config, const ParticleEnsemble& initial,
                                 PusherKind method, NormKind norm,
                                 std::span<const Vec3> reference, const TableauOptions& options) {
  if (options.dx_levels < 1 || options.dt_levels < 1)
    throw Error("tableau needs at least one level per axis");
  ConvergenceTableau t;
  t.method = method;
  t.norm = norm;
  for (int i = 0; i < options.dx_levels; ++i) t.nodes.push_back(config.nodes << i);
  for (int j = 0; j < options.dt_levels; ++j) t.dts.push_back(config.dt / (1 << j));

  for (int i = 0; i < options.dx_levels; ++i) {
    SimConfig c = config;
    c.pusher = method;
    c.nodes = t.nodes[i];
    c.validate();
    std::vector<double> row;
    for (int j = 0; j < options.dt_levels; ++j) {
      const auto x = final_positions(c, initial, 1 << j);
      row.push_back(norm == NormKind::max
                        ? err_max(x, reference, c.length, c.dim())
                        : err_l2(x, reference, c.length / c.nodes, c.length, c.dim()));
    }
    t.errors.push_back(std::move(row));
  }
  return t;
}

void write_tableau_csv(const std::filesystem::path& path, const ConvergenceTableau& tableau) {
  CsvWriter csv(path, {"dx_level", "dt_level", "error", "rate_dt", "rate_dx"});
  const double undefined = std::nan("");
  for (std::size_t i = 0; i < tableau.errors.size(); ++i)
    for (std::size_t j = 0; j < tableau.errors[i].size(); ++j) {
      csv << static_cast<long long>(i) << static_cast<long long>(j) << tableau.errors[i][j]
          << tableau.rate_dt(i, j).value_or(undefined) << tableau.rate_dx(i, j).value_or(undefined);
      csv.end_row();
    }
}

void write_dx_average_csv(const std::filesystem::path& path, const ConvergenceTableau& tableau) {
  CsvWriter csv(path, {"dx_level", "NG", "mean_error"});
  const auto means = tableau.mean_over_dt();
  for (std::size_t i = 0; i < means.size(); ++i) {
    csv << static_cast<long long>(i) << tableau.nodes[i] << means[i];
    csv.end_row();
  }
}

std::vector<BenchRow> runtime_bench(const SimConfig& base, std::span<const PusherKind> methods,
                                    std::span<const int> grid_sizes, double dt, int steps) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (const int ng : grid_sizes) {
    std::vector<SimConfig> configs;
    for (const PusherKind method : methods) {
      SimConfig c = base;
      c.pusher = method;
      c.nodes = ng;
      c.dt = dt;
      c.steps = std::max(steps, 1);
      c.validate();
      configs.push_back(c);
    }
    std::vector<std::vector<double>> times(methods.size());
    if (steps > 0) {
      const ParticleEnsemble initial = initial_conditions(configs.front());
      const RunOptions quiet{.record_diagnostics = false};
      for (const auto& c : configs) run(c, initial, quiet);  // warm-up
      // Repetitions are interleaved across methods so slow machine drift
      // affects every method alike.
      for (int rep = 0; rep < 3; ++rep)
        for (std::size_t m = 0; m < configs.size(); ++m) {
          const auto start = clock::now();
          run(configs[m], initial, quiet);
          times[m].push_back(std::chrono::duration<double>(clock::now() - start).count());
        }
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      double median = 0.0;
      if (!times[m].empty()) {
        std::sort(times[m].begin(), times[m].end());
        median = times[m][1];
      }
      rows.push_back({methods[m], ng, dt, steps, median});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.method != b.method) return to_string(a.method) < to_string(b.method);
    return a.nodes < b.nodes;
  });
  return rows;
}

void write_bench_csv(const std::filesystem::path& path, std::span<const BenchRow> rows) {
  CsvWriter csv(path, {"method", "NG", "dt", "steps", "median_seconds"});
  for (const auto& r : rows) {
    csv << to_string(r.method) << r.nodes << r.dt << r.steps << r.median_seconds;
    csv.end_row();
  }
}

}  // namespace piclab
