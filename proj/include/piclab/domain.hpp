// Core value types shared by every piclab module.
//
// Units are normalized throughout: epsilon0 = mu0 = c = 1.

#ifndef PICLAB_DOMAIN_HPP
#define PICLAB_DOMAIN_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace piclab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by iterative solves that exhaust their iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct Species {
  double charge = -1.0;
  double mass = 1.0;

  double charge_to_mass() const { return charge / mass; }
  /// Throws unless mass > 0 and charge is finite and nonzero.
  void validate() const;
};

/// Uniform periodic grid with NG nodes per axis; node NG is node 0.
class Grid {
 public:
  Grid(int dim, int nodes, double length);

  int dim() const { return dim_; }
  int nodes() const { return nodes_; }
  double length() const { return length_; }
  double spacing() const { return length_ / nodes_; }
  /// Cell volume dx^d.
  double cell_volume() const { return dim_ == 1 ? spacing() : spacing() * spacing(); }
  std::size_t size() const {
    return dim_ == 1 ? static_cast<std::size_t>(nodes_)
                     : static_cast<std::size_t>(nodes_) * static_cast<std::size_t>(nodes_);
  }
  /// Row-major: x varies fastest.
  std::size_t index(int ix, int iy = 0) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nodes_) +
           static_cast<std::size_t>(ix);
  }
  int wrap_index(int i) const {
    i %= nodes_;
    return i < 0 ? i + nodes_ : i;
  }
  double node_position(int i) const { return i * spacing(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_;
  int nodes_;
  double length_;
};

using ScalarField = std::vector<double>;

/// Node-centered vector field; y is empty on 1D grids.
struct VectorField {
  std::vector<double> x;
  std::vector<double> y;

  static VectorField zeros(const Grid& grid) {
    VectorField f;
    f.x.assign(grid.size(), 0.0);
    if (grid.dim() == 2) f.y.assign(grid.size(), 0.0);
    return f;
  }
  bool conforms_to(const Grid& grid) const {
    return x.size() == grid.size() && (grid.dim() == 1 ? y.empty() : y.size() == grid.size());
  }
};

struct FieldState {
  ScalarField rho;
  ScalarField phi;
  VectorField e;
  double b_z = 0.0;
};

/// Per-particle state. Only the first `dim` components of x are periodic;
/// z is carried inertly in 2D runs.
struct ParticleEnsemble {
  Species species;
  /// Physical particles per macro-particle.
  double weight = 1.0;
  int dim = 1;
  std::vector<Vec3> x;
  std::vector<Vec3> v;

  std::size_t size() const { return x.size(); }
  double particle_charge() const { return species.charge * weight; }
  double particle_mass() const { return species.mass * weight; }
};

double wrap_periodic(double x, double length);
Vec3 wrap_periodic(const Vec3& x, double length, int dim);
void wrap_positions(ParticleEnsemble& particles, double length);

/// |q| |B| / m, the magnitude of the Larmor frequency.
double larmor_frequency(const Species& species, double b);

/// Signed gyrofrequency q B / m for B = b e_z. Positive values gyrate clockwise
/// in the x-y plane; all pushers use this sign.
double gyrofrequency(const Species& species, double b_z);

enum class Model { electrostatic_1d, magnetized_2d };

enum class PusherKind { euler, boris_es, boris_em, boris_filter, cyclotronic, implicit_boris };

enum class ShapeOrder { ngp = 0, cic = 1 };

enum class NormKind { max, l2 };

int model_dimension(Model model);
std::string_view to_string(Model model);
std::string_view to_string(PusherKind kind);
std::string_view to_string(NormKind kind);
Model parse_model(std::string_view text);
PusherKind parse_pusher(std::string_view text);
NormKind parse_norm(std::string_view text);
ShapeOrder parse_shape_order(std::string_view text);

}  // namespace piclab

#endif  // PICLAB_DOMAIN_HPP
