#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "hetlab/analysis.hpp"
#include "hetlab/report_json.hpp"

using namespace hetlab;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

// Root of x1 (1 + b11 x1 + c1 x1^2) on [lo, hi] by plain bisection.
double bisect_root(const CoefficientSet& c, double lo, double hi) {
  auto f = [&](double x) { return 1.0 + c.b11 * x + c.c1 * x * x; };
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> numeric_eigenvalues(const CoefficientSet& c, double x1) {
  const auto J = eval_jacobian(c, StateVector{x1, 0, 0, 0});
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = J[i][j];
  Eigen::EigenSolver<Eigen::Matrix4d> es(m);
  std::vector<double> out;
  for (int i = 0; i < 4; ++i) out.push_back(es.eigenvalues()[i].real());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> failing_rows(const CoefficientSet& c) {
  std::vector<std::string> out;
  for (const auto& r : check_table1(c).table1)
    if (!r.pass) out.push_back(r.id);
  return out;
}

}  // namespace

TEST_CASE("equilibria of the reference set") {
  const auto c = reference_coefficients();
  const auto eq = compute_equilibria(c);
  CHECK(std::abs(eq.a.x1_value - -0.3027756) <= 1e-6);
  CHECK(std::abs(eq.b.x1_value - 3.3027756) <= 1e-6);
  CHECK(std::abs(eq.a.x1_value - bisect_root(c, -1.0, 0.0)) <= 1e-14);
  CHECK(std::abs(eq.b.x1_value - bisect_root(c, 1.0, 5.0)) <= 1e-14);

  const double la[4] = {-1.0916731, 2.3027756, -0.1194293, -0.4038703};
  const double lb[4] = {-11.9083269, -1.3027756, 25.1194293, 30.6038703};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(eq.a.eigenvalues[i] - la[i]) <= 1e-6);
    CHECK(std::abs(eq.b.eigenvalues[i] - lb[i]) <= 1e-6);
  }
  const double s = std::sqrt(c.discriminant());
  CHECK(rel(eq.a.eigenvalues[0], eq.a.x1_value * s) <= 1e-12);
  CHECK(rel(eq.b.eigenvalues[0], -eq.b.x1_value * s) <= 1e-12);

  CHECK(eq.a.role_in_p12 == StabilityRole::Saddle);
  CHECK(eq.b.role_in_p12 == StabilityRole::Sink);
  CHECK(eq.a.role_in_s134 == StabilityRole::Sink);
  CHECK(eq.b.role_in_s134 == StabilityRole::Saddle);
}

TEST_CASE("equilibrium errors") {
  auto c = reference_coefficients();
  c.c1 = 3.0;  // 9 - 12 < 0
  CHECK_THROWS_WITH_AS(compute_equilibria(c), doctest::Contains(""), Error);
  try {
    compute_equilibria(c);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoRealEquilibria);
  }
  c.c1 = 1.0;  // both roots negative
  try {
    compute_equilibria(c);
    FAIL("expected SignPatternViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SignPatternViolation);
  }
  c.c1 = 0.0;
  CHECK_THROWS_AS(quadratic_roots(c), Error);
}

TEST_CASE("root and eigenvalue identities over random sets") {
  gen::Gen g(41);
  for (int k = 0; k < 1000; ++k) {
    const auto c = g.valid_coeffs();
    const auto [xa, xb] = quadratic_roots(c);
    CHECK(rel(xa + xb, -c.b11 / c.c1) <= 1e-12);
    CHECK(rel(xa * xb, 1.0 / c.c1) <= 1e-12);
    CHECK(std::abs(1.0 + c.b11 * xa + c.c1 * xa * xa) <= 1e-12 * (1 + std::abs(c.b11 * xa) + std::abs(c.c1 * xa * xa)));

    // Rewritten eigenvalues: 1 - bk1/c1 + (dk - (bk1/c1) b11) x at the roots.
    for (double x : {xa, xb}) {
      const auto lam = eigenvalues_on_axis(c, x);
      const double bk1[3] = {c.b21, c.b31, c.b41};
      const double dk[3] = {c.d2, c.d3, c.d4};
      for (int i = 0; i < 3; ++i) {
        const double alt = 1.0 - bk1[i] / c.c1 + (dk[i] - bk1[i] / c.c1 * c.b11) * x;
        const double scale = 1.0 + std::abs(bk1[i] * x * x) + std::abs(dk[i] * x);
        CHECK(std::abs(lam[i + 1] - alt) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("closed-form eigenvalues match the numeric spectrum") {
  gen::Gen g(43);
  for (int k = 0; k < 200; ++k) {
    const auto c = k == 0 ? reference_coefficients() : g.valid_coeffs();
    const auto [xa, xb] = quadratic_roots(c);
    for (double x : {xa, xb}) {
      auto closed = eigenvalues_on_axis(c, x);
      std::vector<double> cf(closed.begin(), closed.end());
      std::sort(cf.begin(), cf.end());
      const auto num = numeric_eigenvalues(c, x);
      double scale = 0;
      for (double v : cf) scale = std::max(scale, std::abs(v));
      for (int i = 0; i < 4; ++i) CHECK(std::abs(cf[i] - num[i]) <= 1e-8 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("principal plane") {
  const auto c = reference_coefficients();
  CHECK(principal_plane(c) == PrincipalPlane::P14);

  auto swapped = c;
  std::swap(swapped.b31, swapped.b41);
  std::swap(swapped.d3, swapped.d4);
  CHECK(principal_plane(swapped) == PrincipalPlane::P13);

  auto tie = c;
  tie.b41 = tie.b31;
  tie.d4 = tie.d3;
  CHECK(principal_plane(tie) == PrincipalPlane::Tie);

  auto not_saddle = c;
  not_saddle.d3 = -10.0;
  CHECK_THROWS_AS(principal_plane(not_saddle), Error);
}

TEST_CASE("sign table on the reference set and documented failures") {
  const auto c = reference_coefficients();
  const auto r = check_table1(c);
  REQUIRE(r.table1.size() == 18);
  CHECK(r.table1_all_pass());
  for (std::size_t i = 0; i < 18; ++i) CHECK(r.table1[i].id == "C" + std::to_string(i + 1));

  auto c9 = c;
  c9.c1 = 1.0;
  CHECK_FALSE(check_table1(c9).row("C9")->pass);

  auto c16 = c;
  c16.d3 = 5;
  c16.d4 = 4;
  const auto r16 = check_table1(c16);
  CHECK_FALSE(r16.row("C16")->pass);
  CHECK(r16.row("C16")->lhs == doctest::Approx(2.0));
}

TEST_CASE("single-row mutations") {
  struct Mutation {
    const char* row;
    void (*apply)(CoefficientSet&);
  };
  const Mutation cases[] = {
      {"C1", [](CoefficientSet& c) { c.b13 = 1; }},
      {"C2", [](CoefficientSet& c) { c.b14 = 1; }},
      {"C3", [](CoefficientSet& c) { c.b12 = -1; }},
      {"C4", [](CoefficientSet& c) { c.b22 = 0.1; }},
      {"C5", [](CoefficientSet& c) { c.b33 = 1; }},
      {"C6", [](CoefficientSet& c) { c.b44 = 1; }},
      {"C7", [](CoefficientSet& c) { c.c3 = 1; }},
      {"C8", [](CoefficientSet& c) { c.c4 = 1; }},
      {"C9", [](CoefficientSet& c) { c.c1 = 2; }},
      {"C10", [](CoefficientSet& c) { c.b21 = -1; }},
      {"C11", [](CoefficientSet& c) { c.d2 = -2; }},
      {"C12", [](CoefficientSet& c) { c.d3 = -3.5; }},
      {"C14", [](CoefficientSet& c) {
         c.d3 = -1;
         c.d4 = -1.1;
       }},
      {"C15", [](CoefficientSet& c) { c.b41 = 0.9; }},
      {"C16", [](CoefficientSet& c) {
         c.d3 = 5;
         c.d4 = 5.5;
       }},
      {"C18", [](CoefficientSet& c) { c.b11 = -3; }},
  };
  for (const auto& m : cases) {
    CAPTURE(m.row);
    auto c = reference_coefficients();
    m.apply(c);
    CHECK(failing_rows(c) == std::vector<std::string>{m.row});
  }
}

TEST_CASE("C13 and C17 follow from the other rows") {
  // Random sets passing every other row also pass C13 and C17, which is why
  // neither row can be broken on its own.
  gen::Gen g(47);
  int tested = 0;
  for (int k = 0; k < 200000 && tested < 5000; ++k) {
    CoefficientSet c;
    for (const auto& f : kCoefficientFields) c.*f.second = g.uniform(-5, 5);
    // Wide ranges for the coefficients the two rows depend on.
    c.c1 = g.uniform(-5, 0.5);
    c.b11 = g.uniform(-1, 5);
    c.b21 = g.uniform(-1, 5);
    c.b31 = g.uniform(-1, 5);
    c.b41 = g.uniform(-1, 5);
    c.d2 = g.uniform(-10, 2);
    c.d3 = g.uniform(-2, 10);
    c.d4 = g.uniform(-2, 10);
    // Rows C1..C8 are single signs; fix them so the coupled rows get exercised.
    c.b13 = -std::abs(c.b13);
    c.b14 = -std::abs(c.b14);
    c.b12 = std::abs(c.b12);
    c.b22 = -std::abs(c.b22);
    c.b33 = -std::abs(c.b33);
    c.b44 = -std::abs(c.b44);
    c.c3 = -std::abs(c.c3);
    c.c4 = -std::abs(c.c4);
    const auto r = check_table1(c);
    bool others = true;
    for (const auto& row : r.table1)
      if (row.id != "C13" && row.id != "C17") others = others && row.pass;
    if (!others) continue;
    ++tested;
    CHECK(r.row("C13")->pass);
    CHECK(r.row("C17")->pass);
  }
  CHECK(tested >= 1000);
}

TEST_CASE("hypotheses on the reference set") {
  const auto c = reference_coefficients();
  const auto r = check_hypotheses(c);
  REQUIRE(r.hypotheses_populated);
  CHECK(r.ha.status == HypothesisStatus::Pass);
  CHECK(r.hb.status == HypothesisStatus::Pass);
  CHECK(r.hc.status == HypothesisStatus::Deferred);
  CHECK(r.hd.status == HypothesisStatus::Pass);
  CHECK(check_hypotheses(c, true).hc.status == HypothesisStatus::Pass);

  CHECK(r.delta_linear == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(std::abs(r.delta_product - 6.4899) <= 1e-4);
  CHECK(r.delta_product == doctest::Approx(std::sqrt(13.0) * 1.8).epsilon(1e-12));

  CHECK(r.condition3_printed_3.lhs == doctest::Approx(-2.0));
  CHECK(r.condition3_printed_3.rhs == doctest::Approx(14.0));
  CHECK(r.condition3_printed_3.pass);
  CHECK(std::abs(r.condition3_direct.contraction_product - 0.15559) <= 1e-3);
  CHECK(std::abs(r.condition3_direct.expansion_product - 70.474) <= 1e-3);
  CHECK_FALSE(r.condition3_direct.pass);
  CHECK(r.condition3_direct.cbar_a == doctest::Approx(0.1194293).epsilon(1e-6));
  CHECK(r.condition3_direct.cbar_b == doctest::Approx(1.3027756).epsilon(1e-6));
  CHECK(std::abs(r.rho3 - 0.00269) <= 1e-5);
  CHECK(std::abs(r.rho4 - 0.00747) <= 1e-5);

  const auto iso_ab = isotropy_of(SubspaceId::P12);
  CHECK(iso_ab == std::vector<SymmetryElement>{SymmetryElement::Id, SymmetryElement::Kappa34});
  const auto iso_ba = isotropy_of(SubspaceId::S134);
  CHECK(iso_ba == std::vector<SymmetryElement>{SymmetryElement::Id, SymmetryElement::Kappa2});
  const auto comps = isotypic_components();
  CHECK(comps == std::vector<std::vector<std::size_t>>{{0}, {1}, {2, 3}});
}

TEST_CASE("delta identity over random sets") {
  gen::Gen g(53);
  for (int k = 0; k < 1000; ++k) {
    const auto c = g.valid_coeffs();
    const auto r = check_all(c);
    if (!r.hypotheses_populated) continue;
    const auto [xa, xb] = quadratic_roots(c);
    const double expect = (xb - xa) * r.delta_linear;
    // Cancellation in the product form scales with the size of its factors.
    auto factor = [&](double x, double b, double d) { return 1.0 + std::abs(d * x) + std::abs(b * x * x); };
    const double scale = factor(xa, c.b31, c.d3) * factor(xb, c.b41, c.d4) +
                         factor(xb, c.b31, c.d3) * factor(xa, c.b41, c.d4);
    CHECK(std::abs(r.delta_product - expect) <= 1e-9 * std::max(std::abs(expect), 1e-3 * scale));
  }
}

TEST_CASE("check_all never throws and is deterministic") {
  gen::Gen g(59);
  for (int k = 0; k < 300; ++k) {
    const auto c = g.coeffs();
    ConditionReport a, b;
    CHECK_NOTHROW(a = check_all(c));
    CHECK_NOTHROW(b = check_all(c));
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK_NOTHROW(check_construction(c));
  }
  auto bad = reference_coefficients();
  bad.c1 = 3.0;
  const auto r = check_all(bad);
  CHECK_FALSE(r.hypotheses_populated);
  CHECK(r.ha.status == HypothesisStatus::Skipped);
}

TEST_CASE("condition report JSON layout") {
  const auto j = to_json(check_all(reference_coefficients()));
  REQUIRE(j.is_array());
  std::vector<std::string> ids;
  for (const auto& row : j) {
    ids.push_back(row["id"]);
    CHECK(row.contains("lhs"));
    CHECK(row.contains("rhs"));
    CHECK(row.contains("sense"));
    CHECK(row.contains("pass"));
  }
  const std::vector<std::string> tail{"Ha", "Hb", "Hc", "Hd", "H3_direct", "H3_printed_3",
                                      "H3_printed_4", "delta_linear", "delta_product", "rho3",
                                      "rho4"};
  REQUIRE(ids.size() == 18 + tail.size());
  CHECK(std::equal(tail.begin(), tail.end(), ids.begin() + 18));
  CHECK(j[15]["id"] == "C16");
  CHECK(j[15]["sense"] == "<");
}

TEST_CASE("equilibria in P12 off the axes") {
  const auto c = reference_coefficients();
  const auto eqs = p12_interior_equilibria(c);
  REQUIRE(eqs.size() == 2);
  CHECK(eqs[0].x1 == doctest::Approx(4.1169).epsilon(1e-4));
  CHECK(eqs[1].x1 == doctest::Approx(8.6006).epsilon(1e-4));
  for (const auto& e : eqs) {
    CHECK_FALSE(e.inside_d);
    // Both components of the field vanish at (x1, x2).
    const auto f = eval_field(c, StateVector{e.x1, e.x2, 0, 0});
    CHECK(std::abs(f[0]) <= 1e-8 * (1 + e.x1 * e.x1 * e.x1));
    CHECK(std::abs(f[1]) <= 1e-8 * (1 + e.x2 * e.x1 * e.x1));
  }

  auto degenerate = c;
  degenerate.b12 = 0.0;
  try {
    p12_interior_equilibria(degenerate);
    FAIL("expected DegenerateCoefficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateCoefficient);
  }
}

TEST_CASE("construction items") {
  const auto r = check_construction(reference_coefficients());
  CHECK(r.item_i.pass);
  CHECK(r.item_ii.pass);
  CHECK(r.item_iii.pass);
  CHECK_FALSE(r.item_iv.pass);
  REQUIRE(r.principal);
  CHECK(*r.principal == PrincipalPlane::P14);
  CHECK(r.p12_interior_empty);
  CHECK(r.b12_monotonicity_available);
  CHECK_FALSE(r.notes.empty());

  auto neg_b12 = reference_coefficients();
  neg_b12.b12 = -0.5;
  const auto n = check_construction(neg_b12);
  CHECK_FALSE(n.b12_monotonicity_available);
  CHECK(n.item_ii.detail.find("b12") != std::string::npos);

  auto no_roots = reference_coefficients();
  no_roots.c1 = 3.0;
  const auto s = check_construction(no_roots);
  CHECK_FALSE(s.item_i.pass);
  CHECK(s.item_ii.detail.find("skipped") != std::string::npos);
  CHECK(s.item_iv.detail.find("skipped") != std::string::npos);
}

TEST_CASE("coefficient search") {
  SearchConfig point;
  point.box = CoefficientBox::point(reference_coefficients());
  point.max_samples = 5;
  const auto found = find_coefficients(point);
  REQUIRE(std::holds_alternative<SearchSuccess>(found));
  CHECK(std::get<SearchSuccess>(found).coeffs == reference_coefficients());

  // Sign-compatible box; result independent of worker count.
  CoefficientBox box;
  for (std::size_t k = 0; k < kCoefficientCount; ++k) box.bounds[k] = {-5.0, -0.01};
  auto set = [&](std::string_view name, double lo, double hi) {
    for (std::size_t k = 0; k < kCoefficientCount; ++k)
      if (kCoefficientFields[k].first == name) box.bounds[k] = {lo, hi};
  };
  for (auto n : {"b11", "b12", "b21", "b31", "b41"}) set(n, 0.01, 5.0);
  set("d2", -10, 0);
  set("d3", 0, 10);
  set("d4", 0, 10);
  SearchConfig cfg;
  cfg.box = box;
  cfg.rng_seed = 42;
  cfg.threads = 1;
  const auto one = find_coefficients(cfg);
  cfg.threads = 3;
  const auto three = find_coefficients(cfg);
  REQUIRE(std::holds_alternative<SearchSuccess>(one));
  REQUIRE(std::holds_alternative<SearchSuccess>(three));
  const auto& s1 = std::get<SearchSuccess>(one);
  CHECK(s1.sample_index == std::get<SearchSuccess>(three).sample_index);
  CHECK(s1.coeffs == std::get<SearchSuccess>(three).coeffs);
  CHECK(check_table1(s1.coeffs).table1_all_pass());
  CHECK(check_construction(s1.coeffs).items_i_to_iii());
  CHECK(search_failures(SearchMode::Table1Literal, s1.coeffs).empty());

  // Infeasible box: c1 > 0 everywhere.
  set("c1", 0.5, 1.0);
  SearchConfig bad;
  bad.mode = SearchMode::DirectConditions;
  bad.box = box;
  bad.max_samples = 2000;
  const auto fail = find_coefficients(bad);
  REQUIRE(std::holds_alternative<SearchFailure>(fail));
  const auto& hist = std::get<SearchFailure>(fail).failure_histogram;
  CHECK(hist.at("C9") == 2000);
  for (const auto& [k, v] : hist) CHECK(v <= hist.at("C9"));
}

TEST_CASE("box JSON") {
  const auto box = CoefficientBox::point(reference_coefficients());
  CHECK(box_from_json(box_to_json(box)).bounds == box.bounds);
  std::string text = box_to_json(box, -1);
  const auto pos = text.find("\"c1\":[-1.0,-1.0]");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 16, "\"c1\":[1.0,-1.0]");
  try {
    box_from_json(text);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
  CHECK_THROWS_AS(search_mode_from_string("nope"), Error);
}

TEST_CASE("openness probe") {
  const auto c = reference_coefficients();
  CHECK(openness_probe(c, 0.0, 100, 1) == 1.0);
  CHECK(openness_probe(c, 0.001, 1000, 7) >= 0.99);
  CHECK(openness_probe(c, 10.0, 1000, 7) < 1.0);
  auto bad = c;
  bad.c1 = 1.0;
  CHECK_THROWS_AS(openness_probe(bad, 0.1, 10, 1), Error);

  gen::Gen g(61);
  for (int k = 0; k < 5; ++k) CHECK(openness_probe(g.table1_coeffs(), 1e-6, 50, k) == 1.0);
}
