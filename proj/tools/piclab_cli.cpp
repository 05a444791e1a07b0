// piclab command-line front end.
//
//   piclab run      --config FILE [--set key=value]... [--out DIR]
//   piclab converge --config FILE [--methods a,b,...] [--dx-levels N] [--dt-levels N]
//                   [--reference PUSHER]
//   piclab bench    --config FILE [--methods a,b,...] [--grid-sizes 32,64,...]
//   piclab fields   --config FILE
//   piclab check    --config FILE
//
// Exit codes: 0 success, 1 error, 2 stability warning (check only).
// PICLAB_OUTPUT_DIR sets the output directory when --out is not given.

#include <CLI11.hpp>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "piclab/config.hpp"
#include "piclab/csv.hpp"
#include "piclab/grid_fields.hpp"
#include "piclab/harness.hpp"
#include "piclab/maxwell_theta.hpp"
#include "piclab/sim_engine.hpp"

namespace fs = std::filesystem;
using namespace piclab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitStability = 2;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "config file (key = value lines)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", args.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("-o,--out", args.out_dir, "output directory");
}

SimConfig load(const CommonArgs& args) {
  SimConfig config = load_config(args.config_path);
  for (const auto& o : args.overrides) apply_override(config, o);
  config.validate();
  return config;
}

fs::path output_dir(const CommonArgs& args) {
  fs::path dir = args.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("PICLAB_OUTPUT_DIR");
    dir = env && *env ? fs::path(env) : fs::path("piclab_out");
  }
  fs::create_directories(dir);
  return dir;
}

std::vector<PusherKind> parse_methods(const std::string& list) {
  std::vector<PusherKind> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const std::string item =
        list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(parse_pusher(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

fs::path ic_path(const fs::path& dir, const SimConfig& c) {
  return dir / ("initial_conditions_" + std::string(to_string(c.model)) + "_P" +
                std::to_string(c.particles) + "_seed" + std::to_string(c.seed) + ".csv");
}

int cmd_run(const CommonArgs& args) {
  const SimConfig config = load(args);
  const fs::path dir = output_dir(args);
  const ParticleEnsemble initial = load_or_create_initial_conditions(config, ic_path(dir, config));
  const RunResult result = run(config, initial);

  write_diagnostics_csv(dir / "diagnostics.csv", result.diagnostics);
  write_particles_csv(dir / "final_state.csv", result.final_state);
  const Grid grid = config.grid();
  write_field_csv(dir / "rho.csv", result.fields.rho, grid);
  write_field_csv(dir / "phi.csv", result.fields.phi, grid);
  write_field_csv(dir / "ex.csv", result.fields.e.x, grid);
  if (grid.dim() == 2) write_field_csv(dir / "ey.csv", result.fields.e.y, grid);

  const std::string report = result.stability.to_text();
  {
    std::ofstream out(dir / "stability.txt", std::ios::binary);
    out << report;
  }
  if (!result.stability.all_pass()) std::cerr << "warning: stability criteria violated\n" << report;
  std::cout << "wrote " << result.diagnostics.records.size() << " diagnostic records to "
            << (dir / "diagnostics.csv").string() << '\n';
  return kExitOk;
}

// Mean of the dt-rates at the finest spatial level over pairs whose finer
// error still sits well above the reference's own accuracy.
double summary_rate_dt(const ConvergenceTableau& t, double reference_residual) {
  const std::size_t i = t.errors.size() - 1;
  double sum = 0.0;
  int count = 0;
  for (std::size_t j = 1; j < t.errors[i].size(); ++j) {
    if (t.errors[i][j] <= 100.0 * reference_residual) break;
    if (const auto r = t.rate_dt(i, j)) {
      sum += *r;
      ++count;
    }
  }
  return count ? sum / count : std::nan("");
}

double summary_rate_dx(const ConvergenceTableau& t, double reference_residual) {
  const std::size_t j = t.errors.front().size() - 1;
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 1; i < t.errors.size(); ++i) {
    if (t.errors[i][j] <= 100.0 * reference_residual) break;
    if (const auto r = t.rate_dx(i, j)) {
      sum += *r;
      ++count;
    }
  }
  return count ? sum / count : std::nan("");
}

int cmd_converge(const CommonArgs& args, const std::string& methods_arg, int dx_levels,
                 int dt_levels, const std::string& reference_name) {
  const PusherKind reference_pusher = parse_pusher(reference_name);
  SimConfig config = load(args);
  const auto methods = parse_methods(methods_arg.empty() ? std::string(to_string(config.pusher))
                                                         : methods_arg);
  if (methods.empty()) throw CLI::ValidationError("--methods", "method list is empty");
  if (dx_levels <= 0) dx_levels = config.frozen_field ? 1 : 5;
  if (dt_levels <= 0) dt_levels = std::countr_zero(static_cast<unsigned>(config.fine_divisor)) + 1;

  const fs::path dir = output_dir(args);
  const ParticleEnsemble initial = load_or_create_initial_conditions(config, ic_path(dir, config));

  SimConfig finest = config;
  finest.nodes = config.nodes << (dx_levels - 1);
  finest.pusher = methods.front();
  finest.validate();
  std::cout << "reference: " << to_string(reference_pusher) << ", NG=" << finest.nodes
            << ", dt/" << config.fine_divisor << '\n';
  const ReferenceSolution reference =
      certify_reference(finest, initial, config.fine_divisor, reference_pusher);

  std::ofstream cert(dir / "reference_certificate.txt", std::ios::binary);
  cert << "reference = " << to_string(reference_pusher)
       << "\nfine_divisor = " << config.fine_divisor
       << "\nresidual = " << format_double(reference.residual) << '\n';
  bool certified = true;
  for (const PusherKind m : methods) {
    SimConfig c = finest;
    c.pusher = m;
    c.validate();
    const double bound =
        err_max(final_positions(c, initial, 1), reference.positions_half, c.length, c.dim());
    const bool ok = reference.residual <= bound;
    certified = certified && ok;
    cert << "bound[" << to_string(m) << "] = " << format_double(bound) << (ok ? " ok" : " FAILED")
         << '\n';
  }
  cert.close();
  if (!certified) {
    std::cerr << "error: reference solution is not converged at dt/" << config.fine_divisor
              << "; increase fine_divisor (see reference_certificate.txt)\n";
    return kExitError;
  }

  CsvWriter summary(dir / "summary.csv", {"method", "rate_dt", "rate_dx", "finest_error"});
  const TableauOptions options{dx_levels, dt_levels};
  for (const PusherKind m : methods) {
    const auto tableau = build_tableau(config, initial, m, config.norm, reference.positions, options);
    const std::string name(to_string(m));
    write_tableau_csv(dir / ("tableau_" + name + ".csv"), tableau);
    write_dx_average_csv(dir / ("dx_average_" + name + ".csv"), tableau);
    const double rdt = summary_rate_dt(tableau, reference.residual);
    const double rdx = summary_rate_dx(tableau, reference.residual);
    summary << std::string_view(name) << rdt << rdx << tableau.errors.back().back();
    summary.end_row();
    std::cout << name << ": rate_dt " << format_double(rdt) << ", rate_dx " << format_double(rdx)
              << '\n';
  }
  return kExitOk;
}

int cmd_bench(const CommonArgs& args, const std::string& methods_arg,
              const std::vector<int>& grid_sizes) {
  const SimConfig config = load(args);
  const auto methods = parse_methods(
      methods_arg.empty() ? std::string("euler,boris-em,boris-filter,cyclotronic") : methods_arg);
  if (methods.empty()) throw CLI::ValidationError("--methods", "method list is empty");
  const fs::path dir = output_dir(args);
  const auto rows = runtime_bench(config, methods, grid_sizes, config.dt, config.steps);
  write_bench_csv(dir / "bench.csv", rows);
  for (const auto& r : rows)
    std::cout << to_string(r.method) << " NG=" << r.nodes << " " << r.median_seconds << " s\n";
  return kExitOk;
}

int cmd_fields(const CommonArgs& args) {
  const SimConfig config = load(args);
  const double theta = config.theta.value_or(0.5);
  const fs::path dir = output_dir(args);
  const Grid grid(2, config.nodes, config.length);
  EMState state = plane_wave(grid);
  const VectorField no_current = VectorField::zeros(grid);

  CsvWriter energy(dir / "em_energy.csv", {"step", "time", "energy"});
  energy << 0 << 0.0 << em_energy(state);
  energy.end_row();
  for (int step = 1; step <= config.steps; ++step) {
    maxwell_theta_step(state, no_current, config.dt, theta);
    energy << step << state.time << em_energy(state);
    energy.end_row();
  }
  write_em_state_csv(dir / "em_state.csv", state);
  std::cout << "theta = " << theta << ", c dt / dx = " << config.dt / grid.spacing()
            << ", final energy " << format_double(em_energy(state)) << ", max |div E - rho| "
            << format_double(divergence_error(state, ScalarField(grid.size(), 0.0))) << '\n';
  return kExitOk;
}

int cmd_check(const CommonArgs& args) {
  const SimConfig config = load(args);
  const StabilityReport report = stability_check(config);
  std::cout << report.to_text();
  return report.all_pass() ? kExitOk : kExitStability;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piclab: particle-in-cell integrator laboratory"};
  app.require_subcommand(1);

  CommonArgs run_args, converge_args, bench_args, fields_args, check_args;
  std::string converge_methods, bench_methods;
  int dx_levels = 0;
  int dt_levels = 0;
  std::string reference_name = "euler";
  std::vector<int> grid_sizes{32, 64, 128, 256, 512, 1024};

  auto* run_cmd = app.add_subcommand("run", "run one PIC simulation");
  add_common(run_cmd, run_args);

  auto* converge_cmd = app.add_subcommand("converge", "space-time convergence study");
  add_common(converge_cmd, converge_args);
  converge_cmd->add_option("-m,--methods", converge_methods, "comma-separated pushers");
  converge_cmd->add_option("--dx-levels", dx_levels, "spatial refinement levels (default 5, 1 frozen)");
  converge_cmd->add_option("--dt-levels", dt_levels,
                           "temporal refinement levels (default log2(fine_divisor)+1)");

  converge_cmd->add_option("--reference", reference_name,
                           "reference pusher (euler; others for cross-validation only)");

  auto* bench_cmd = app.add_subcommand("bench", "runtime benchmark");
  add_common(bench_cmd, bench_args);
  bench_cmd->add_option("-m,--methods", bench_methods, "comma-separated pushers");
  bench_cmd->add_option("-g,--grid-sizes", grid_sizes, "grid sizes")->delimiter(',');

  auto* fields_cmd = app.add_subcommand("fields", "theta-scheme Maxwell plane-wave run");
  add_common(fields_cmd, fields_args);

  auto* check_cmd = app.add_subcommand("check", "report explicit stability criteria");
  add_common(check_cmd, check_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run_cmd) return cmd_run(run_args);
    if (*converge_cmd) return cmd_converge(converge_args, converge_methods, dx_levels, dt_levels,
                                                reference_name);
    if (*bench_cmd) return cmd_bench(bench_args, bench_methods, grid_sizes);
    if (*fields_cmd) return cmd_fields(fields_args);
    if (*check_cmd) return cmd_check(check_args);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
