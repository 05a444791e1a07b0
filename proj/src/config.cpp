#include "piclab/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace piclab {

namespace {

constexpr std::array<std::string_view, 17> kKeys{
    "model", "pusher", "NG",       "L",             "P",           "dt",
    "steps", "seed",   "B",        "v0",            "perturbation", "filter_passes",
    "shape_order",     "fine_divisor", "norm",      "frozen_field", "theta"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw Error("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw Error("invalid boolean '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::span<const std::string_view> config_keys() { return kKeys; }

void apply_setting(SimConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "model") c.model = parse_model(value);
  else if (key == "pusher") c.pusher = parse_pusher(value);
  else if (key == "NG") c.nodes = parse_number<int>(key, value);
  else if (key == "L") c.length = parse_number<double>(key, value);
  else if (key == "P") c.particles = parse_number<int>(key, value);
  else if (key == "dt") c.dt = parse_number<double>(key, value);
  else if (key == "steps") c.steps = parse_number<int>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "B") c.b = parse_number<double>(key, value);
  else if (key == "v0") c.v0 = parse_number<double>(key, value);
  else if (key == "perturbation") c.perturbation = parse_number<double>(key, value);
  else if (key == "filter_passes") c.filter_passes = parse_number<int>(key, value);
  else if (key == "shape_order") c.shape_order = parse_shape_order(value);
  else if (key == "fine_divisor") c.fine_divisor = parse_number<int>(key, value);
  else if (key == "norm") c.norm = parse_norm(value);
  else if (key == "frozen_field") c.frozen_field = parse_bool(key, value);
  else if (key == "theta") c.theta = parse_number<double>(key, value);
  else throw Error("unknown config key '" + std::string(key) + "'");
}

void apply_override(SimConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw Error("override '" + std::string(assignment) + "' is not of the form key=value");
  apply_setting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

SimConfig parse_config(std::string_view text) {
  SimConfig config;
  bool pusher_given = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    pusher_given = pusher_given || key == "pusher";
    try {
      apply_setting(config, key, line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  // The default pusher follows the model when the file does not name one.
  if (!pusher_given && config.model == Model::magnetized_2d) config.pusher = PusherKind::boris_em;
  return config;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void SimConfig::validate() const {
  species.validate();
  if (nodes < 4) throw Error("NG must be at least 4");
  if (!(length > 0.0) || !std::isfinite(length)) throw Error("L must be positive");
  if (particles < 1) throw Error("P must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("dt must be positive");
  if (steps < 1) throw Error("steps must be at least 1");
  if (filter_passes < 0) throw Error("filter_passes must be non-negative");
  if (!is_power_of_two(fine_divisor)) throw Error("fine_divisor must be a power of two");
  if (theta && !(*theta >= 0.0 && *theta <= 1.0)) throw Error("theta must lie in [0, 1]");
  if (!std::isfinite(b)) throw Error("B must be finite");

  const bool two_d = model == Model::magnetized_2d;
  switch (pusher) {
    case PusherKind::boris_em:
    case PusherKind::cyclotronic:
      if (!two_d)
        throw Error("pusher '" + std::string(to_string(pusher)) +
                    "' requires model magnetized-2d (2D); config model is " +
                    std::string(to_string(model)) + " (1D)");
      break;
    case PusherKind::boris_es:
      if (two_d)
        throw Error("pusher 'boris-es' requires model electrostatic-1d (1D); use boris-em for "
                    "magnetized-2d");
      break;
    default:
      break;
  }
  if (!two_d && b != 0.0) throw Error("B requires model magnetized-2d; electrostatic-1d has no magnetic field");
  if (pusher == PusherKind::cyclotronic && b == 0.0)
    throw Error("cyclotronic pusher needs a nonzero B (its rotation divides by the Larmor frequency); "
                "use boris-em for B = 0");
}

}  // namespace piclab
