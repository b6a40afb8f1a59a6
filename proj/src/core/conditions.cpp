#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "hetlab/analysis.hpp"

namespace hetlab {

std::string_view to_string(Sense s) { return s == Sense::Less ? "<" : ">"; }

std::string_view to_string(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::Pass: return "pass";
    case HypothesisStatus::Fail: return "fail";
    case HypothesisStatus::Deferred: return "deferred";
    case HypothesisStatus::Skipped: return "skipped";
  }
  return "?";
}

bool ConditionReport::table1_all_pass() const {
  return !table1.empty() &&
         std::all_of(table1.begin(), table1.end(), [](const ConditionRow& r) { return r.pass; });
}

const ConditionRow* ConditionReport::row(std::string_view id) const {
  for (const auto& r : table1)
    if (r.id == id) return &r;
  return nullptr;
}

namespace {

ConditionRow make_row(std::string id, double lhs, Sense sense, double rhs) {
  ConditionRow r{std::move(id), lhs, rhs, sense, false};
  r.pass = sense == Sense::Less ? lhs < rhs : lhs > rhs;
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string group_string(const std::vector<SymmetryElement>& g) {
  std::string s = "{";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) s += ", ";
    s += to_string(g[i]);
  }
  return s + "}";
}

// Non-radial axes of a carrier subspace through L1: the eigendirections
// tangent to connections lying in it.
std::vector<std::size_t> tangent_axes(SubspaceId carrier) {
  std::vector<std::size_t> axes;
  const auto mask = vanishing_coordinates(carrier);
  for (std::size_t i = 1; i < 4; ++i)
    if (!mask[i]) axes.push_back(i);
  return axes;
}

bool within_single_component(const std::vector<std::size_t>& axes) {
  for (const auto& comp : isotypic_components()) {
    if (std::all_of(axes.begin(), axes.end(), [&](std::size_t a) {
          return std::find(comp.begin(), comp.end(), a) != comp.end();
        }))
      return true;
  }
  return false;
}

double weakest_contraction(const std::array<double, 4>& l) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double v : l)
    if (v < 0.0 && !(std::abs(v) >= best)) best = std::abs(v);
  return best;
}

double strongest_expansion(const std::array<double, 4>& l) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double v : l)
    if (v > 0.0 && !(v <= best)) best = v;
  return best;
}

}  // namespace

std::vector<SymmetryElement> isotropy_of(SubspaceId id) {
  const auto mask = vanishing_coordinates(id);
  StateVector generic;
  for (std::size_t i = 0; i < 4; ++i) generic[i] = mask[i] ? 0.0 : 1.0 + 0.5 * i;
  std::vector<SymmetryElement> out;
  for (auto g : kGroupElements)
    if (apply_symmetry(g, generic) == generic) out.push_back(g);
  return out;
}

std::vector<std::vector<std::size_t>> isotypic_components() {
  // Each axis carries a one-dimensional real character; axes with equal
  // characters form one isotypic component.
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::array<int, 4>> chars;
  for (std::size_t axis = 0; axis < 4; ++axis) {
    std::array<int, 4> ch{};
    for (std::size_t k = 0; k < 4; ++k) ch[k] = axis_character(kGroupElements[k], axis);
    auto it = std::find(chars.begin(), chars.end(), ch);
    if (it == chars.end()) {
      chars.push_back(ch);
      comps.push_back({axis});
    } else {
      comps[static_cast<std::size_t>(it - chars.begin())].push_back(axis);
    }
  }
  return comps;
}

ConditionReport check_table1(const CoefficientSet& c) {
  ConditionReport r;
  r.discriminant = c.discriminant();
  auto& t = r.table1;
  t.reserve(18);
  t.push_back(make_row("C1", c.b13, Sense::Less, 0.0));
  t.push_back(make_row("C2", c.b14, Sense::Less, 0.0));
  t.push_back(make_row("C3", c.b12, Sense::Greater, 0.0));
  t.push_back(make_row("C4", c.b22, Sense::Less, 0.0));
  t.push_back(make_row("C5", c.b33, Sense::Less, 0.0));
  t.push_back(make_row("C6", c.b44, Sense::Less, 0.0));
  t.push_back(make_row("C7", c.c3, Sense::Less, 0.0));
  t.push_back(make_row("C8", c.c4, Sense::Less, 0.0));
  t.push_back(make_row("C9", c.c1, Sense::Less, 0.0));
  t.push_back(make_row("C10", c.b21, Sense::Greater, 0.0));
  t.push_back(make_row("C11", c.d2 - (c.b21 / c.c1) * c.b11, Sense::Less, 0.0));
  t.push_back(make_row("C12", c.d3 - (c.b31 / c.c1) * c.b11, Sense::Greater, 0.0));
  t.push_back(make_row("C13", c.d4 - (c.b41 / c.c1) * c.b11, Sense::Greater, 0.0));
  t.push_back(make_row("C14", c.d4 - c.d3, Sense::Greater, 0.0));
  t.push_back(make_row("C15", c.b41 - c.b31, Sense::Greater, 0.0));
  t.push_back(make_row("C16", c.d3 * c.b41 - c.d4 * c.b31, Sense::Less, 0.0));
  t.push_back(make_row("C17", (c.c1 - c.b31) * (c.d2 * c.c1 - c.b21 * c.b11), Sense::Less,
                       (c.c1 - c.b21) * (c.d3 * c.c1 - c.b31 * c.b11)));
  t.push_back(make_row("C18", c.b11, Sense::Greater, 0.0));
  return r;
}

ConditionReport check_hypotheses(const CoefficientSet& c, std::optional<bool> connections_verified) {
  const EquilibriumPair eq = compute_equilibria(c);
  const auto& la = eq.a.eigenvalues;
  const auto& lb = eq.b.eigenvalues;
  const double xa = eq.a.x1_value, xb = eq.b.x1_value;

  ConditionReport r;
  r.discriminant = c.discriminant();
  r.hypotheses_populated = true;

  // (Ha) connection C_ab lies in P12, C_ba in S134.
  const auto iso_ab = isotropy_of(SubspaceId::P12);
  const auto iso_ba = isotropy_of(SubspaceId::S134);
  r.ha = {"Ha", iso_ab.size() > 1 && iso_ba.size() > 1 ? HypothesisStatus::Pass
                                                        : HypothesisStatus::Fail,
          "C_ab in P12 has isotropy " + group_string(iso_ab) + "; C_ba in S134 has isotropy " +
              group_string(iso_ba)};

  // (Hb) target of each connection is a sink inside Fix of its isotropy.
  const bool hb = eq.b.role_in_p12 == StabilityRole::Sink &&
                  eq.a.role_in_s134 == StabilityRole::Sink;
  r.hb = {"Hb", hb ? HypothesisStatus::Pass : HypothesisStatus::Fail,
          "xi_b in P12: " + std::string(to_string(eq.b.role_in_p12)) + "; xi_a in S134: " +
              std::string(to_string(eq.a.role_in_s134))};

  // (Hc) unstable manifolds: 1-d along L2 at xi_a, 2-d in P34 at xi_b.
  const bool patterns = la[0] < 0 && la[1] > 0 && la[2] < 0 && la[3] < 0 && lb[0] < 0 &&
                        lb[1] < 0 && lb[2] > 0 && lb[3] > 0;
  HypothesisStatus hc = HypothesisStatus::Fail;
  std::string hc_evidence = patterns ? "unstable eigenspaces: L2 at xi_a, P34 at xi_b"
                                     : "eigenvalue sign pattern of items (ii)/(iii) fails";
  if (patterns) {
    if (connections_verified.value_or(false)) {
      hc = HypothesisStatus::Pass;
      hc_evidence += "; C_ab, C_ba(P13), C_ba(P14) verified by shooting";
    } else {
      hc = HypothesisStatus::Deferred;
      hc_evidence += connections_verified.has_value()
                         ? "; shooting did not verify every connection"
                         : "; connections not yet verified numerically";
    }
  }
  r.hc = {"Hc", hc, hc_evidence};

  const auto ab_axes = tangent_axes(SubspaceId::P12);
  const auto ba_axes = tangent_axes(SubspaceId::S134);
  const bool hd = within_single_component(ab_axes) && within_single_component(ba_axes);
  r.hd = {"Hd", hd ? HypothesisStatus::Pass : HypothesisStatus::Fail,
          "tangent to C_ab: L2; tangent to C_ba: P34; isotypic decomposition L1 + L2 + P34"};

  auto& d = r.condition3_direct;
  d.cbar_a = weakest_contraction(la);
  d.cbar_b = weakest_contraction(lb);
  d.ebar_a = strongest_expansion(la);
  d.ebar_b = strongest_expansion(lb);
  d.contraction_product = d.cbar_a * d.cbar_b;
  d.expansion_product = d.ebar_a * d.ebar_b;
  d.pass = d.contraction_product > d.expansion_product;

  r.condition3_printed_3 =
      make_row("H3_printed_3", (c.c1 - c.b31) * (c.d2 * c.c1 - c.b21 * c.b11), Sense::Less,
               (c.c1 - c.b21) * (c.d3 * c.c1 - c.b31 * c.b11));
  r.condition3_printed_4 =
      make_row("H3_printed_4", (c.c1 - c.b41) * (c.d2 * c.c1 - c.b21 * c.b11), Sense::Less,
               (c.c1 - c.b21) * (c.d4 * c.c1 - c.b41 * c.b11));

  r.delta_product = (1.0 + c.d3 * xa + c.b31 * xa * xa) * (1.0 + c.d4 * xb + c.b41 * xb * xb) -
                    (1.0 + c.d3 * xb + c.b31 * xb * xb) * (1.0 + c.d4 * xa + c.b41 * xa * xa);
  r.delta_linear = c.d4 - c.d3 + (c.b41 - c.b31) * (xa + xb) + (c.d3 * c.b41 - c.d4 * c.b31) * xa * xb;

  r.rho3 = (std::abs(la[2]) / la[1]) * (std::abs(lb[1]) / lb[2]);
  r.rho4 = (std::abs(la[3]) / la[1]) * (std::abs(lb[1]) / lb[3]);
  return r;
}

ConditionReport check_all(const CoefficientSet& c, std::optional<bool> connections_verified) {
  ConditionReport r = check_table1(c);
  try {
    ConditionReport h = check_hypotheses(c, connections_verified);
    h.table1 = std::move(r.table1);
    return h;
  } catch (const Error& e) {
    for (auto* entry : {&r.ha, &r.hb, &r.hc, &r.hd}) {
      entry->status = HypothesisStatus::Skipped;
      entry->evidence = std::string("equilibria unavailable: ") + e.what();
    }
    r.ha.id = "Ha";
    r.hb.id = "Hb";
    r.hc.id = "Hc";
    r.hd.id = "Hd";
    return r;
  }
}

ConstructionReport check_construction(const CoefficientSet& c) {
  ConstructionReport r;
  try {
    std::tie(r.x_a, r.x_b) = quadratic_roots(c);
    r.roots_available = true;
  } catch (const Error& e) {
    r.item_i = {false, e.what()};
    for (auto* item : {&r.item_ii, &r.item_iii, &r.item_iv})
      *item = {false, "skipped: item (i) failed"};
    return r;
  }

  r.item_i.pass = r.x_a < 0.0 && r.x_b > 0.0;
  r.item_i.detail = "x_a = " + fmt(r.x_a) + ", x_b = " + fmt(r.x_b);
  if (!r.item_i.pass) {
    r.item_i.detail += " (roots do not straddle the origin)";
    for (auto* item : {&r.item_ii, &r.item_iii, &r.item_iv})
      *item = {false, "skipped: item (i) failed"};
    return r;
  }

  r.equilibria = compute_equilibria(c);
  const auto& la = r.equilibria->a.eigenvalues;
  const auto& lb = r.equilibria->b.eigenvalues;

  // (ii) in P12: xi_a saddle with lambda2 > 0, xi_b sink.
  const bool p12_signs = la[0] < 0 && la[1] > 0 && lb[0] < 0 && lb[1] < 0;
  r.b12_monotonicity_available = c.b12 > 0.0;
  std::string p12_detail;
  bool p12_ok = false;
  try {
    r.p12_equilibria = p12_interior_equilibria(c);
    r.p12_interior_empty = std::none_of(r.p12_equilibria.begin(), r.p12_equilibria.end(),
                                        [](const P12Equilibrium& e) { return e.inside_d; });
    p12_ok = r.p12_interior_empty;
    p12_detail = std::to_string(r.p12_equilibria.size()) + " equilibria in P12 off the axes, " +
                 (r.p12_interior_empty ? "none inside D" : "at least one inside D");
  } catch (const Error& e) {
    p12_detail = std::string("P12 equilibrium scan unavailable: ") + e.what();
  }
  r.item_ii.pass = p12_signs && p12_ok;
  r.item_ii.detail = "xi_a " + std::string(to_string(r.equilibria->a.role_in_p12)) +
                     " (lambda1=" + fmt(la[0]) + ", lambda2=" + fmt(la[1]) + "), xi_b " +
                     std::string(to_string(r.equilibria->b.role_in_p12)) + " (lambda1=" +
                     fmt(lb[0]) + ", lambda2=" + fmt(lb[1]) + "); " + p12_detail;
  if (!r.b12_monotonicity_available) {
    r.notes.push_back(
        "b12 <= 0: the monotonicity of x1' along the x2 direction is unavailable; existence of "
        "C_ab rests on shooting");
    r.item_ii.detail += "; connection existence deferred to shooting (b12 <= 0)";
  }

  // (iii) in S134: xi_a sink, xi_b saddle with lambda3, lambda4 > 0.
  r.item_iii.pass = la[0] < 0 && la[2] < 0 && la[3] < 0 && lb[0] < 0 && lb[2] > 0 && lb[3] > 0;
  r.item_iii.detail = "xi_a " + std::string(to_string(r.equilibria->a.role_in_s134)) +
                      " (lambda3=" + fmt(la[2]) + ", lambda4=" + fmt(la[3]) + "), xi_b " +
                      std::string(to_string(r.equilibria->b.role_in_s134)) + " (lambda3=" +
                      fmt(lb[2]) + ", lambda4=" + fmt(lb[3]) + ")";

  // (iv) principal connection from xi_b expected in P13.
  try {
    r.principal = principal_plane(c);
    r.principal_is_p13 = *r.principal == PrincipalPlane::P13;
    r.item_iv.pass = r.principal_is_p13;
    r.item_iv.detail = "principal plane " + std::string(to_string(*r.principal)) +
                       " (lambda3(xi_b)=" + fmt(lb[2]) + ", lambda4(xi_b)=" + fmt(lb[3]) + ")";
    if (!r.principal_is_p13) {
      r.item_iv.detail += "; construction asserts the principal connection lies in P13";
      r.notes.push_back("principal plane is " + std::string(to_string(*r.principal)) +
                        ", not P13 as the construction asserts");
    }
  } catch (const Error& e) {
    r.item_iv = {false, e.what()};
  }
  return r;
}

}  // namespace hetlab
