#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "hetlab/analysis.hpp"

namespace hetlab {

std::string_view to_string(EquilibriumLabel label) {
  return label == EquilibriumLabel::XiA ? "xi_a" : "xi_b";
}

std::string_view to_string(StabilityRole role) {
  switch (role) {
    case StabilityRole::Sink: return "sink";
    case StabilityRole::Saddle: return "saddle";
    case StabilityRole::Source: return "source";
  }
  return "?";
}

std::string_view to_string(PrincipalPlane p) {
  switch (p) {
    case PrincipalPlane::P13: return "P13";
    case PrincipalPlane::P14: return "P14";
    case PrincipalPlane::Tie: return "Tie";
  }
  return "?";
}

std::pair<double, double> quadratic_roots(const CoefficientSet& c) {
  if (c.c1 == 0.0) throw Error(ErrorCode::DegenerateCoefficient, "c1 must be nonzero");
  const double disc = c.discriminant();
  if (!(disc > 0.0))
    throw Error(ErrorCode::NoRealEquilibria,
                "b11^2 - 4 c1 = " + std::to_string(disc) + " is not positive");
  const double sign = c.b11 >= 0.0 ? 1.0 : -1.0;
  const double q = -0.5 * (c.b11 + sign * std::sqrt(disc));
  double r1 = q / c.c1;
  double r2 = 1.0 / q;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

std::array<double, 4> eigenvalues_on_axis(const CoefficientSet& c, double x) {
  const double x2 = x * x;
  return {c.b11 * x + 2.0 * c.c1 * x2,
          1.0 + c.b21 * x2 + c.d2 * x,
          1.0 + c.b31 * x2 + c.d3 * x,
          1.0 + c.b41 * x2 + c.d4 * x};
}

namespace {

StabilityRole classify(std::initializer_list<double> eigenvalues) {
  bool all_neg = true, all_pos = true;
  for (double v : eigenvalues) {
    all_neg = all_neg && v < 0.0;
    all_pos = all_pos && v > 0.0;
  }
  if (all_neg) return StabilityRole::Sink;
  if (all_pos) return StabilityRole::Source;
  return StabilityRole::Saddle;
}

EquilibriumRecord make_record(const CoefficientSet& c, EquilibriumLabel label, double x) {
  EquilibriumRecord r;
  r.label = label;
  r.x1_value = x;
  r.eigenvalues = eigenvalues_on_axis(c, x);
  const auto& l = r.eigenvalues;
  r.role_in_p12 = classify({l[0], l[1]});
  r.role_in_s134 = classify({l[0], l[2], l[3]});
  return r;
}

}  // namespace

EquilibriumPair compute_equilibria(const CoefficientSet& c) {
  const auto [lo, hi] = quadratic_roots(c);
  if (!(lo < 0.0 && hi > 0.0))
    throw Error(ErrorCode::SignPatternViolation,
                "equilibria on L1 at " + std::to_string(lo) + " and " + std::to_string(hi) +
                    " do not straddle the origin");
  return {make_record(c, EquilibriumLabel::XiA, lo), make_record(c, EquilibriumLabel::XiB, hi)};
}

PrincipalPlane principal_plane(const CoefficientSet& c) {
  const auto eq = compute_equilibria(c);
  const double l3 = eq.b.eigenvalues[2];
  const double l4 = eq.b.eigenvalues[3];
  if (!(l3 > 0.0 && l4 > 0.0))
    throw Error(ErrorCode::NotASaddleInS134,
                "lambda3(xi_b) = " + std::to_string(l3) + ", lambda4(xi_b) = " +
                    std::to_string(l4) + "; both must be positive");
  if (std::abs(l3 - l4) <= 1e-12 * std::max(l3, l4)) return PrincipalPlane::Tie;
  return l3 > l4 ? PrincipalPlane::P13 : PrincipalPlane::P14;
}

}  // namespace hetlab
