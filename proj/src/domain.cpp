#include "piclab/domain.hpp"

#include <array>
#include <utility>

namespace piclab {

void Species::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw Error("species mass must be positive and finite");
  if (!std::isfinite(charge) || charge == 0.0)
    throw Error("species charge must be finite and nonzero");
}

Grid::Grid(int dim, int nodes, double length) : dim_(dim), nodes_(nodes), length_(length) {
  if (dim != 1 && dim != 2) throw Error("grid dimension must be 1 or 2");
  if (nodes < 4) throw Error("grid needs at least 4 nodes per axis, got " + std::to_string(nodes));
  if (!(length > 0.0) || !std::isfinite(length)) throw Error("grid length must be positive");
}

double wrap_periodic(double x, double length) {
  if (!std::isfinite(x)) throw Error("cannot wrap a non-finite position");
  if (!(length > 0.0)) throw Error("wrap length must be positive");
  if (x >= 0.0 && x < length) return x;
  double r = std::fmod(x, length);
  if (r < 0.0) r += length;
  // r + length can round up to length for tiny negative r.
  if (r >= length) r = 0.0;
  return r;
}

Vec3 wrap_periodic(const Vec3& x, double length, int dim) {
  Vec3 r = x;
  r.x = wrap_periodic(x.x, length);
  if (dim == 2) r.y = wrap_periodic(x.y, length);
  return r;
}

void wrap_positions(ParticleEnsemble& particles, double length) {
  for (auto& x : particles.x) x = wrap_periodic(x, length, particles.dim);
}

double larmor_frequency(const Species& species, double b) {
  if (!(species.mass > 0.0)) throw Error("species mass must be positive");
  if (!std::isfinite(b) || !std::isfinite(species.charge))
    throw Error("larmor frequency of non-finite input");
  return std::abs(species.charge) * std::abs(b) / species.mass;
}

double gyrofrequency(const Species& species, double b_z) {
  if (!(species.mass > 0.0)) throw Error("species mass must be positive");
  return species.charge * b_z / species.mass;
}

int model_dimension(Model model) { return model == Model::electrostatic_1d ? 1 : 2; }

namespace {

constexpr std::array<std::pair<Model, std::string_view>, 2> kModels{{
    {Model::electrostatic_1d, "electrostatic-1d"},
    {Model::magnetized_2d, "magnetized-2d"},
}};

constexpr std::array<std::pair<PusherKind, std::string_view>, 6> kPushers{{
    {PusherKind::euler, "euler"},
    {PusherKind::boris_es, "boris-es"},
    {PusherKind::boris_em, "boris-em"},
    {PusherKind::boris_filter, "boris-filter"},
    {PusherKind::cyclotronic, "cyclotronic"},
    {PusherKind::implicit_boris, "implicit-boris"},
}};

template <class Table>
auto parse_from(const Table& table, std::string_view text, std::string_view what) {
  for (const auto& [value, name] : table)
    if (name == text) return value;
  std::string known;
  for (const auto& entry : table) {
    if (!known.empty()) known += ", ";
    known += entry.second;
  }
  throw Error("unknown " + std::string(what) + " '" + std::string(text) + "' (expected one of: " +
              known + ")");
}

template <class Table, class Value>
std::string_view name_from(const Table& table, Value v) {
  for (const auto& [value, name] : table)
    if (value == v) return name;
  return "?";
}

}  // namespace

std::string_view to_string(Model model) { return name_from(kModels, model); }
std::string_view to_string(PusherKind kind) { return name_from(kPushers, kind); }
std::string_view to_string(NormKind kind) { return kind == NormKind::max ? "max" : "l2"; }

Model parse_model(std::string_view text) { return parse_from(kModels, text, "model"); }
PusherKind parse_pusher(std::string_view text) {
  // Alias used in the literature for the cyclotronic integrator.
  if (text == "cyclic") return PusherKind::cyclotronic;
  return parse_from(kPushers, text, "pusher");
}

NormKind parse_norm(std::string_view text) {
  if (text == "max") return NormKind::max;
  if (text == "l2" || text == "L2") return NormKind::l2;
  throw Error("unknown norm '" + std::string(text) + "' (expected max or l2)");
}

ShapeOrder parse_shape_order(std::string_view text) {
  if (text == "0" || text == "ngp") return ShapeOrder::ngp;
  if (text == "1" || text == "cic") return ShapeOrder::cic;
  throw Error("unknown shape_order '" + std::string(text) + "' (expected 0/ngp or 1/cic)");
}

}  // namespace piclab
