#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "piclab/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string output;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "piclab_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome invoke(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = std::string(PICLAB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& body) {
  const fs::path path = dir / name;
  std::ofstream(path) << body;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

const char* kTwoStream = "model = electrostatic-1d\npusher = boris-es\nNG = 32\nP = 1000\nsteps = 40\n";

}  // namespace

TEST_CASE("run writes the documented files") {
  const auto dir = scratch("run");
  const auto cfg = write_config(dir, "two_stream.cfg", kTwoStream);
  const auto r = invoke("run --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
  REQUIRE(r.code == 0);
  CHECK(first_line(dir / "out" / "diagnostics.csv") == "step,time,kinetic,field,total,momentum_x,charge");
  CHECK(first_line(dir / "out" / "final_state.csv") == "particle_index,x,vx");
  CHECK(first_line(dir / "out" / "rho.csv") == "node_index,value");
  CHECK(slurp(dir / "out" / "stability.txt").find("Langmuir") != std::string::npos);
  CHECK(piclab::read_csv(dir / "out" / "diagnostics.csv").rows.size() == 41);
}

TEST_CASE("run twice gives byte-identical diagnostics") {
  const auto dir = scratch("determinism");
  const auto cfg = write_config(dir, "a.cfg", kTwoStream);
  REQUIRE(invoke("run --config " + cfg.string() + " --out " + (dir / "one").string(), dir).code == 0);
  REQUIRE(invoke("run --config " + cfg.string() + " --out " + (dir / "two").string(), dir).code == 0);
  REQUIRE(invoke("run --config " + cfg.string() + " --out " + (dir / "one").string(), dir).code == 0);
  const auto a = slurp(dir / "one" / "diagnostics.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "two" / "diagnostics.csv"));
  CHECK(slurp(dir / "one" / "final_state.csv") == slurp(dir / "two" / "final_state.csv"));
}

TEST_CASE("the output directory can come from the environment") {
  const auto dir = scratch("env");
  const auto cfg = write_config(dir, "a.cfg", kTwoStream);
  const auto target = dir / "from_env";
  const auto r = invoke("run --config " + cfg.string(), dir);
  (void)r;
  const std::string cmd = "PICLAB_OUTPUT_DIR=" + target.string() + " " + PICLAB_CLI_PATH +
                          " run --config " + cfg.string() + " > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(target / "diagnostics.csv"));
}

TEST_CASE("dimension constraint is reported") {
  const auto dir = scratch("dimension");
  const auto cfg = write_config(dir, "x.cfg", kTwoStream);
  const auto r = invoke("run --config " + cfg.string() + " --set pusher=cyclotronic --out " + dir.string(), dir);
  CHECK(r.code == 1);
  CHECK(r.output.find("2D") != std::string::npos);
}

TEST_CASE("configuration errors exit with status 1") {
  const auto dir = scratch("errors");
  const auto bad = write_config(dir, "bad.cfg", "NG = 32\ntimestep = 0.1\n");
  auto r = invoke("run --config " + bad.string() + " --out " + dir.string(), dir);
  CHECK(r.code == 1);
  CHECK(r.output.find("timestep") != std::string::npos);
  r = invoke("run --config " + (dir / "missing.cfg").string(), dir);
  CHECK(r.code == 1);
  r = invoke("frobnicate", dir);
  CHECK(r.code == 1);
}

TEST_CASE("check exit codes") {
  const auto dir = scratch("check");
  const auto cfg = write_config(dir, "a.cfg", kTwoStream);
  CHECK(invoke("check --config " + cfg.string(), dir).code == 0);
  const auto r = invoke("check --config " + cfg.string() + " --set dt=2.5", dir);
  CHECK(r.code == 2);
  CHECK(r.output.find("Langmuir") != std::string::npos);

  const auto maxwell = write_config(dir, "maxwell.cfg",
                                    "model = magnetized-2d\nNG = 32\nL = 1\ndt = 0.125\ntheta = 0.5\n");
  const auto m = invoke("check --config " + maxwell.string(), dir);
  CHECK(m.code == 0);
  CHECK(m.output.find("CFL (c dt / dx <= 1): not applicable (implicit)") != std::string::npos);
}

TEST_CASE("converge in frozen-field mode") {
  const auto dir = scratch("converge");
  const auto cfg = write_config(dir, "frozen.cfg",
                                "model = magnetized-2d\nfrozen_field = true\nB = 1\nP = 2\nNG = 16\n"
                                "dt = 0.2\nsteps = 50\nfine_divisor = 2048\n");
  const auto out = dir / "out";
  const auto r = invoke("converge --config " + cfg.string() +
                            " --methods euler,boris-em,cyclotronic --reference cyclotronic --out " +
                            out.string(),
                        dir);
  REQUIRE(r.code == 0);
  const auto summary = piclab::read_csv(out / "summary.csv");
  REQUIRE(summary.rows.size() == 3);
  const double expected[] = {1.0, 2.0, 2.0};
  for (int i = 0; i < 3; ++i) {
    CAPTURE(summary.rows[i][0]);
    CHECK(std::abs(piclab::parse_double(summary.rows[i][1]) - expected[i]) <= 0.2);
  }
  const auto tableau = piclab::read_csv(out / "tableau_euler.csv");
  CHECK(tableau.header.size() == 5);
  CHECK(tableau.rows.size() == 12);
  CHECK(fs::exists(out / "reference_certificate.txt"));

  const auto shallow = invoke("converge --config " + cfg.string() +
                                  " --methods euler --dt-levels 4 --out " + (dir / "shallow").string(),
                              dir);
  REQUIRE(shallow.code == 0);
  CHECK(piclab::read_csv(dir / "shallow" / "tableau_euler.csv").rows.size() == 4);
}

TEST_CASE("converge rejects an empty method list") {
  const auto dir = scratch("converge_empty");
  const auto cfg = write_config(dir, "a.cfg", kTwoStream);
  const auto r = invoke("converge --config " + cfg.string() + " --methods , --out " + dir.string(), dir);
  CHECK(r.code == 1);
  CHECK(r.output.find("empty") != std::string::npos);
}

TEST_CASE("converge fails when the reference certificate fails") {
  const auto dir = scratch("converge_cert");
  const auto cfg = write_config(dir, "frozen.cfg",
                                "model = magnetized-2d\nfrozen_field = true\nB = 1\nP = 2\nNG = 16\n"
                                "dt = 0.2\nsteps = 50\nfine_divisor = 1\n");
  const auto r = invoke("converge --config " + cfg.string() + " --methods cyclotronic --out " + dir.string(), dir);
  CHECK(r.code == 1);
  CHECK(r.output.find("fine_divisor") != std::string::npos);
}

TEST_CASE("bench table") {
  const auto dir = scratch("bench");
  const auto cfg = write_config(dir, "b.cfg", "model = magnetized-2d\nB = 1\nP = 64\nsteps = 2\n");
  const auto r = invoke("bench --config " + cfg.string() + " --out " + dir.string(), dir);
  REQUIRE(r.code == 0);
  const auto table = piclab::read_csv(dir / "bench.csv");
  CHECK(table.header == std::vector<std::string>{"method", "NG", "dt", "steps", "median_seconds"});
  REQUIRE(table.rows.size() == 24);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& a = table.rows[i - 1];
    const auto& b = table.rows[i];
    CHECK((a[0] < b[0] || (a[0] == b[0] && std::stoi(a[1]) < std::stoi(b[1]))));
  }
  const auto again = invoke("bench --config " + cfg.string() + " --grid-sizes 8,16 --methods euler --out " +
                                (dir / "again").string(),
                            dir);
  REQUIRE(again.code == 0);
  CHECK(piclab::read_csv(dir / "again" / "bench.csv").header == table.header);
}

TEST_CASE("fields writes energy and state") {
  const auto dir = scratch("fields");
  const auto cfg = write_config(dir, "m.cfg", "model = magnetized-2d\nNG = 16\nL = 1\ndt = 0.25\nsteps = 20\ntheta = 0.5\n");
  const auto r = invoke("fields --config " + cfg.string() + " --out " + dir.string(), dir);
  REQUIRE(r.code == 0);
  CHECK(first_line(dir / "em_state.csv") == "Ex,Ey,Bz");
  CHECK(piclab::read_csv(dir / "em_state.csv").rows.size() == 256);
  const auto energy = piclab::read_csv(dir / "em_energy.csv");
  REQUIRE(energy.rows.size() == 21);
  CHECK(piclab::parse_double(energy.rows.back()[2]) ==
        doctest::Approx(piclab::parse_double(energy.rows.front()[2])).epsilon(1e-9));
}
