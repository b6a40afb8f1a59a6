#pragma once

// The Z2 x Z2-equivariant polynomial vector field on R^4 supporting a
// heteroclinic cycle between two equilibria on the x1 axis.
//
//   x1' = x1 + sum_i b1i xi^2 + c1 x1^3
//   x2' = x2 (1 + sum_i b2i xi^2 + d2 x1)
//   x3' = x3 (1 + sum_i b3i xi^2 + c3 x3 x4 + d3 x1)
//   x4' = x4 (1 + sum_i b4i xi^2 + c4 x3 x4 + d4 x1)

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "hetlab/error.hpp"

namespace hetlab {

struct CoefficientSet {
  double b11 = 0, b12 = 0, b13 = 0, b14 = 0;
  double b21 = 0, b22 = 0, b23 = 0, b24 = 0;
  double b31 = 0, b32 = 0, b33 = 0, b34 = 0;
  double b41 = 0, b42 = 0, b43 = 0, b44 = 0;
  double c1 = 0, c3 = 0, c4 = 0;
  double d2 = 0, d3 = 0, d4 = 0;

  double discriminant() const { return b11 * b11 - 4.0 * c1; }
  // Equilibria on L1 are defined only when this holds.
  bool valid_for_equilibria() const {
    return b11 != 0.0 && discriminant() > 0.0;
  }
  bool all_finite() const;

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;
};

inline constexpr std::size_t kCoefficientCount = 22;

using CoefficientField = std::pair<std::string_view, double CoefficientSet::*>;

// Serialization order; also the key set accepted by the JSON reader.
inline constexpr std::array<CoefficientField, kCoefficientCount> kCoefficientFields{{
    {"b11", &CoefficientSet::b11}, {"b12", &CoefficientSet::b12},
    {"b13", &CoefficientSet::b13}, {"b14", &CoefficientSet::b14},
    {"b21", &CoefficientSet::b21}, {"b22", &CoefficientSet::b22},
    {"b23", &CoefficientSet::b23}, {"b24", &CoefficientSet::b24},
    {"b31", &CoefficientSet::b31}, {"b32", &CoefficientSet::b32},
    {"b33", &CoefficientSet::b33}, {"b34", &CoefficientSet::b34},
    {"b41", &CoefficientSet::b41}, {"b42", &CoefficientSet::b42},
    {"b43", &CoefficientSet::b43}, {"b44", &CoefficientSet::b44},
    {"c1", &CoefficientSet::c1},   {"c3", &CoefficientSet::c3},
    {"c4", &CoefficientSet::c4},   {"d2", &CoefficientSet::d2},
    {"d3", &CoefficientSet::d3},   {"d4", &CoefficientSet::d4},
}};

// Reference coefficient set satisfying every row of the sign table.
CoefficientSet reference_coefficients();

std::string coefficients_to_json(const CoefficientSet& c, int indent = 2);
// Throws Error(Parse) on malformed input, unknown keys, or missing keys.
CoefficientSet coefficients_from_json(std::string_view text);

struct StateVector {
  std::array<double, 4> x{};

  StateVector() = default;
  StateVector(double x1, double x2, double x3, double x4) : x{x1, x2, x3, x4} {}

  double& operator[](std::size_t i) { return x[i]; }
  double operator[](std::size_t i) const { return x[i]; }

  bool all_finite() const {
    return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]) &&
           std::isfinite(x[3]);
  }
  double norm() const {
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
  }

  StateVector& operator+=(const StateVector& o) {
    for (std::size_t i = 0; i < 4; ++i) x[i] += o.x[i];
    return *this;
  }
  StateVector& operator-=(const StateVector& o) {
    for (std::size_t i = 0; i < 4; ++i) x[i] -= o.x[i];
    return *this;
  }
  StateVector& operator*=(double s) {
    for (auto& v : x) v *= s;
    return *this;
  }
  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(double s, StateVector a) { return a *= s; }
  friend StateVector operator*(StateVector a, double s) { return a *= s; }
  friend bool operator==(const StateVector&, const StateVector&) = default;
};

inline double distance(const StateVector& a, const StateVector& b) {
  return (a - b).norm();
}

inline StateVector unit_vector(std::size_t axis) {
  StateVector e;
  e[axis] = 1.0;
  return e;
}

using Matrix4 = std::array<std::array<double, 4>, 4>;

StateVector eval_field(const CoefficientSet& c, const StateVector& x);
// Analytic partial derivatives; entry [i][j] = d(xdot_i)/d(x_j).
Matrix4 eval_jacobian(const CoefficientSet& c, const StateVector& x);

// Field evaluation without finiteness checks, for the integrator inner loop.
StateVector eval_field_unchecked(const CoefficientSet& c, const StateVector& x);

// ---------------------------------------------------------------------------
// Symmetry group Gamma = <kappa2, kappa34> ~ Z2 x Z2.

enum class SymmetryElement { Id, Kappa2, Kappa34, Kappa2Kappa34 };

inline constexpr std::array<SymmetryElement, 4> kGroupElements{
    SymmetryElement::Id, SymmetryElement::Kappa2, SymmetryElement::Kappa34,
    SymmetryElement::Kappa2Kappa34};

std::string_view to_string(SymmetryElement g);
StateVector apply_symmetry(SymmetryElement g, const StateVector& x);
SymmetryElement compose(SymmetryElement g, SymmetryElement h);
// Sign of coordinate axis i under g (+1 or -1).
int axis_character(SymmetryElement g, std::size_t axis);

// ---------------------------------------------------------------------------
// Coordinate subspaces.

enum class SubspaceId { L1, L2, L3, L4, P12, P13, P14, P34, S134, Full };

inline constexpr std::array<SubspaceId, 10> kSubspaces{
    SubspaceId::L1,  SubspaceId::L2,  SubspaceId::L3,  SubspaceId::L4,
    SubspaceId::P12, SubspaceId::P13, SubspaceId::P14, SubspaceId::P34,
    SubspaceId::S134, SubspaceId::Full};

std::string_view to_string(SubspaceId id);
// Mask of coordinates that must vanish on the subspace.
std::array<bool, 4> vanishing_coordinates(SubspaceId id);
double subspace_distance(SubspaceId id, const StateVector& x);
bool in_subspace(SubspaceId id, const StateVector& x, double tol = 1e-9);
// Orthogonal projection onto the subspace (vanishing components zeroed).
StateVector project(SubspaceId id, const StateVector& x);

}  // namespace hetlab
