#include "hetlab/model.hpp"

#include <algorithm>

#include "json.hpp"

namespace hetlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::NoRealEquilibria: return "NoRealEquilibria";
    case ErrorCode::SignPatternViolation: return "SignPatternViolation";
    case ErrorCode::DegenerateCoefficient: return "DegenerateCoefficient";
    case ErrorCode::NotASaddleInS134: return "NotASaddleInS134";
    case ErrorCode::NoUnstableDirection: return "NoUnstableDirection";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::Io: return "IoError";
  }
  return "UnknownError";
}

bool CoefficientSet::all_finite() const {
  return std::all_of(kCoefficientFields.begin(), kCoefficientFields.end(),
                     [this](const CoefficientField& f) { return std::isfinite(this->*f.second); });
}

CoefficientSet reference_coefficients() {
  CoefficientSet c;
  c.b11 = 3.0;  c.b12 = 1.0;  c.b13 = -1.0; c.b14 = -1.0;
  c.b21 = 1.0;  c.b22 = -0.1; c.b23 = -1.0; c.b24 = -1.0;
  c.b31 = 1.0;  c.b32 = -1.0; c.b33 = -1.0; c.b34 = -1.0;
  c.b41 = 1.2;  c.b42 = -1.0; c.b43 = -1.0; c.b44 = -1.0;
  c.c1 = -1.0;  c.c3 = -1.0;  c.c4 = -1.0;
  c.d2 = -4.0;  c.d3 = 4.0;   c.d4 = 5.0;
  return c;
}

std::string coefficients_to_json(const CoefficientSet& c, int indent) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, member] : kCoefficientFields) j[std::string(name)] = c.*member;
  return j.dump(indent);
}

CoefficientSet coefficients_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("malformed coefficient JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "coefficient JSON must be an object");

  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(kCoefficientFields.begin(), kCoefficientFields.end(),
                                   [&](const CoefficientField& f) { return f.first == key; });
    if (!known) throw Error(ErrorCode::Parse, "unknown coefficient key \"" + key + "\"");
  }

  CoefficientSet c;
  for (const auto& [name, member] : kCoefficientFields) {
    const std::string key(name);
    auto it = j.find(key);
    if (it == j.end()) throw Error(ErrorCode::Parse, "missing coefficient key \"" + key + "\"");
    if (!it->is_number())
      throw Error(ErrorCode::Parse, "coefficient \"" + key + "\" is not a number");
    c.*member = it->get<double>();
    if (!std::isfinite(c.*member))
      throw Error(ErrorCode::Parse, "coefficient \"" + key + "\" is not finite");
  }
  return c;
}

StateVector eval_field_unchecked(const CoefficientSet& c, const StateVector& s) {
  const double x1 = s[0], x2 = s[1], x3 = s[2], x4 = s[3];
  const double q1 = x1 * x1, q2 = x2 * x2, q3 = x3 * x3, q4 = x4 * x4;
  const double x34 = x3 * x4;

  const double r1 = c.b12 * q2 + c.b13 * q3 + c.b14 * q4;
  const double r2 = c.b21 * q1 + c.b22 * q2 + c.b23 * q3 + c.b24 * q4;
  const double r3 = c.b31 * q1 + c.b32 * q2 + c.b33 * q3 + c.b34 * q4;
  const double r4 = c.b41 * q1 + c.b42 * q2 + c.b43 * q3 + c.b44 * q4;

  return {x1 * (1.0 + x1 * (c.b11 + c.c1 * x1)) + r1,
          x2 * (1.0 + r2 + c.d2 * x1),
          x3 * (1.0 + r3 + c.c3 * x34 + c.d3 * x1),
          x4 * (1.0 + r4 + c.c4 * x34 + c.d4 * x1)};
}

namespace {

void require_finite(const CoefficientSet& c, const StateVector& x) {
  if (!c.all_finite()) throw Error(ErrorCode::Domain, "non-finite coefficient");
  if (!x.all_finite()) throw Error(ErrorCode::Domain, "non-finite state");
}

}  // namespace

StateVector eval_field(const CoefficientSet& c, const StateVector& x) {
  require_finite(c, x);
  return eval_field_unchecked(c, x);
}

Matrix4 eval_jacobian(const CoefficientSet& c, const StateVector& s) {
  require_finite(c, s);
  const double x1 = s[0], x2 = s[1], x3 = s[2], x4 = s[3];
  const double q1 = x1 * x1, q2 = x2 * x2, q3 = x3 * x3, q4 = x4 * x4;
  const double x34 = x3 * x4;

  const double r2 = c.b21 * q1 + c.b22 * q2 + c.b23 * q3 + c.b24 * q4;
  const double r3 = c.b31 * q1 + c.b32 * q2 + c.b33 * q3 + c.b34 * q4;
  const double r4 = c.b41 * q1 + c.b42 * q2 + c.b43 * q3 + c.b44 * q4;

  Matrix4 J{};
  J[0] = {1.0 + x1 * (2.0 * c.b11 + 3.0 * c.c1 * x1), 2.0 * c.b12 * x2,
          2.0 * c.b13 * x3, 2.0 * c.b14 * x4};
  J[1] = {x2 * (2.0 * c.b21 * x1 + c.d2), 1.0 + r2 + c.d2 * x1 + 2.0 * c.b22 * q2,
          2.0 * c.b23 * x2 * x3, 2.0 * c.b24 * x2 * x4};
  J[2] = {x3 * (2.0 * c.b31 * x1 + c.d3), 2.0 * c.b32 * x2 * x3,
          1.0 + r3 + c.c3 * x34 + c.d3 * x1 + x3 * (2.0 * c.b33 * x3 + c.c3 * x4),
          x3 * (2.0 * c.b34 * x4 + c.c3 * x3)};
  J[3] = {x4 * (2.0 * c.b41 * x1 + c.d4), 2.0 * c.b42 * x2 * x4,
          x4 * (2.0 * c.b43 * x3 + c.c4 * x4),
          1.0 + r4 + c.c4 * x34 + c.d4 * x1 + x4 * (2.0 * c.b44 * x4 + c.c4 * x3)};
  return J;
}

std::string_view to_string(SymmetryElement g) {
  switch (g) {
    case SymmetryElement::Id: return "Id";
    case SymmetryElement::Kappa2: return "Kappa2";
    case SymmetryElement::Kappa34: return "Kappa34";
    case SymmetryElement::Kappa2Kappa34: return "Kappa2Kappa34";
  }
  return "?";
}

int axis_character(SymmetryElement g, std::size_t axis) {
  const bool flips2 = g == SymmetryElement::Kappa2 || g == SymmetryElement::Kappa2Kappa34;
  const bool flips34 = g == SymmetryElement::Kappa34 || g == SymmetryElement::Kappa2Kappa34;
  if (axis == 1 && flips2) return -1;
  if ((axis == 2 || axis == 3) && flips34) return -1;
  return 1;
}

StateVector apply_symmetry(SymmetryElement g, const StateVector& x) {
  StateVector y = x;
  for (std::size_t i = 0; i < 4; ++i)
    if (axis_character(g, i) < 0) y[i] = -y[i];
  return y;
}

SymmetryElement compose(SymmetryElement g, SymmetryElement h) {
  // Elements are encoded by which generators they contain; composition is XOR.
  auto bits = [](SymmetryElement e) { return static_cast<int>(e); };
  return static_cast<SymmetryElement>(bits(g) ^ bits(h));
}

std::string_view to_string(SubspaceId id) {
  switch (id) {
    case SubspaceId::L1: return "L1";
    case SubspaceId::L2: return "L2";
    case SubspaceId::L3: return "L3";
    case SubspaceId::L4: return "L4";
    case SubspaceId::P12: return "P12";
    case SubspaceId::P13: return "P13";
    case SubspaceId::P14: return "P14";
    case SubspaceId::P34: return "P34";
    case SubspaceId::S134: return "S134";
    case SubspaceId::Full: return "Full";
  }
  return "?";
}

std::array<bool, 4> vanishing_coordinates(SubspaceId id) {
  switch (id) {
    case SubspaceId::L1: return {false, true, true, true};
    case SubspaceId::L2: return {true, false, true, true};
    case SubspaceId::L3: return {true, true, false, true};
    case SubspaceId::L4: return {true, true, true, false};
    case SubspaceId::P12: return {false, false, true, true};
    case SubspaceId::P13: return {false, true, false, true};
    case SubspaceId::P14: return {false, true, true, false};
    case SubspaceId::P34: return {true, true, false, false};
    case SubspaceId::S134: return {false, true, false, false};
    case SubspaceId::Full: return {false, false, false, false};
  }
  return {false, false, false, false};
}

double subspace_distance(SubspaceId id, const StateVector& x) {
  const auto mask = vanishing_coordinates(id);
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    if (mask[i]) sum += x[i] * x[i];
  return std::sqrt(sum);
}

bool in_subspace(SubspaceId id, const StateVector& x, double tol) {
  return subspace_distance(id, x) <= tol;
}

StateVector project(SubspaceId id, const StateVector& x) {
  const auto mask = vanishing_coordinates(id);
  StateVector y = x;
  for (std::size_t i = 0; i < 4; ++i)
    if (mask[i]) y[i] = 0.0;
  return y;
}

}  // namespace hetlab
