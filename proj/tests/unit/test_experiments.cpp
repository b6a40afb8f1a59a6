#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "hetlab/experiments.hpp"
#include "hetlab/report_json.hpp"

using namespace hetlab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

bool mentions(const std::vector<std::string>& list, const std::string& needle) {
  return std::any_of(list.begin(), list.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("reference connections verify") {
  const auto c = reference_coefficients();
  const auto eq = compute_equilibria(c);
  struct Leg {
    EquilibriumLabel from, to;
    SubspaceId carrier;
  };
  for (const auto& leg : {Leg{EquilibriumLabel::XiA, EquilibriumLabel::XiB, SubspaceId::P12},
                          Leg{EquilibriumLabel::XiB, EquilibriumLabel::XiA, SubspaceId::P13},
                          Leg{EquilibriumLabel::XiB, EquilibriumLabel::XiA, SubspaceId::P14}}) {
    CAPTURE(to_string(leg.carrier));
    const auto r = verify_connection(c, leg.from, leg.to, leg.carrier);
    CHECK(r.verified);
    CHECK(r.termination == Termination::EventHit);
    CHECK(r.terminal_distance <= 1e-6);
    CHECK(r.max_carrier_drift <= 1e-9);
    CHECK(r.transit_time > 0.0);
    REQUIRE(r.path.size() > 2);
    CHECK(r.path.front() == eq[leg.from].point());
    CHECK(distance(r.path.back(), eq[leg.to].point()) <= 1e-6);
    for (const auto& x : r.path) CHECK(subspace_distance(leg.carrier, x) == 0.0);
  }
}

TEST_CASE("connection preconditions") {
  const auto c = reference_coefficients();
  // Within P12 the x2 direction contracts at xi_b.
  CHECK(code_of([&] { verify_connection(c, EquilibriumLabel::XiB, EquilibriumLabel::XiA, SubspaceId::P12); }) ==
        ErrorCode::NoUnstableDirection);
  // Within P13 the x3 direction contracts at xi_a.
  CHECK(code_of([&] { verify_connection(c, EquilibriumLabel::XiA, EquilibriumLabel::XiB, SubspaceId::P13); }) ==
        ErrorCode::NoUnstableDirection);
  CHECK(code_of([&] { verify_connection(c, EquilibriumLabel::XiA, EquilibriumLabel::XiB, SubspaceId::L1); }) ==
        ErrorCode::PreconditionViolated);
}

TEST_CASE("classification on the direct set") {
  const auto c = fixtures::direct_set();
  const auto eq = compute_equilibria(c);
  const auto b = eq.b.point();
  for (const StateVector& x0 : {StateVector{b[0], 1e-4, 1e-3, 1e-6}, StateVector{b[0], 1e-4, 1e-6, 1e-3},
                                StateVector{20, 20, 20, 20}}) {
    const auto r = classify_trajectory(c, x0);
    CHECK(r.outcome == Outcome::AttractedP13);
    REQUIRE(r.loops.size() >= 3);
    const auto& last = r.loops.back();
    CHECK(last.exit_angle <= 0.01);
    CHECK(last.min_distance_a < r.loops[r.loops.size() - 2].min_distance_a);
    for (std::size_t i = 0; i < r.loops.size(); ++i) CHECK(r.loops[i].index == static_cast<int>(i));
  }
}

TEST_CASE("classification on the reference set") {
  const auto c = reference_coefficients();
  const auto b = compute_equilibria(c).b.point();
  const auto r = classify_trajectory(c, {b[0], 1e-4, 1e-3, 1e-6});
  CHECK(r.outcome == Outcome::OtherAttractor);
  CHECK(r.loops.size() <= 1);

  // Inside the invariant plane P13 the state cannot return to xi_b.
  const auto p = classify_trajectory(c, {b[0], 0, 1e-3, 0});
  CHECK(p.outcome == Outcome::Undecided);
}

TEST_CASE("classification input checks") {
  const auto c = reference_coefficients();
  ClassifyConfig cfg;
  cfg.decisive_loops = 0;
  CHECK(code_of([&] { classify_trajectory(c, {1, 1, 1, 1}, cfg); }) == ErrorCode::Config);
  CHECK(code_of([&] { classify_trajectory(c, {NAN, 1, 1, 1}); }) == ErrorCode::Domain);
}

TEST_CASE("Wilson interval") {
  const double z = 1.959963984540054;
  for (std::uint64_t n : {1u, 10u, 100u, 1000u}) {
    for (std::uint64_t k = 0; k <= n; k += std::max<std::uint64_t>(1, n / 7)) {
      const auto p = wilson_interval(k, n);
      const double ph = static_cast<double>(k) / n;
      const double denom = 1 + z * z / n;
      const double mid = (ph + z * z / (2.0 * n)) / denom;
      const double half = z * std::sqrt(ph * (1 - ph) / n + z * z / (4.0 * n * n)) / denom;
      CHECK(p.count == k);
      CHECK(p.fraction == doctest::Approx(ph));
      if (k > 0) CHECK(p.ci_low == doctest::Approx(mid - half).epsilon(1e-12));
      if (k < n) CHECK(p.ci_high == doctest::Approx(mid + half).epsilon(1e-12));
      CHECK(p.ci_low <= ph);
      CHECK(p.ci_high >= ph);
    }
    CHECK(wilson_interval(0, n).ci_low == 0.0);
    CHECK(wilson_interval(n, n).ci_high == 1.0);
  }
  CHECK(wilson_interval(0, 1000).ci_high == doctest::Approx(0.0038267).epsilon(1e-4));
  CHECK_THROWS_AS(wilson_interval(0, 0), Error);
  CHECK_THROWS_AS(wilson_interval(5, 4), Error);
}

TEST_CASE("ball samples are uniform in the 4-ball") {
  const StateVector center{1, 2, 3, 4};
  const double eps = 0.01;
  const std::size_t n = 20000;
  std::size_t inner = 0;
  StateVector mean;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = sample_ball(center, eps, 17, i);
    const double r = distance(x, center);
    CHECK(r <= eps);
    inner += r <= 0.5 * eps;
    mean += (1.0 / n) * (x - center);
  }
  // P(r <= eps/2) = 1/16 for the uniform 4-ball.
  const double p = 1.0 / 16.0;
  CHECK(std::abs(static_cast<double>(inner) / n - p) <= 4 * std::sqrt(p * (1 - p) / n));
  for (int k = 0; k < 4; ++k) CHECK(std::abs(mean[k]) <= 4 * eps / std::sqrt(4.0 * n));
  CHECK(sample_ball(center, eps, 17, 3) == sample_ball(center, eps, 17, 3));
  CHECK_FALSE(sample_ball(center, eps, 17, 3) == sample_ball(center, eps, 18, 3));
}

TEST_CASE("tube arc-length parametrisation") {
  CycleTube t;
  t.vertices = {{0, 0, 0, 0}, {1, 0, 0, 0}, {1, 2, 0, 0}};
  t.cumulative = {0, 1, 3};
  CHECK(t.length() == 3.0);
  CHECK(t.point_at(0) == StateVector{0, 0, 0, 0});
  CHECK(t.point_at(0.5) == StateVector{0.5, 0, 0, 0});
  CHECK(t.point_at(2) == StateVector{1, 1, 0, 0});
  CHECK(t.point_at(3) == StateVector{1, 2, 0, 0});

  const auto c = reference_coefficients();
  const auto tube = make_cycle_tube(c, CycleId::P14Cycle);
  CHECK(tube.cycle == CycleId::P14Cycle);
  CHECK(tube.vertices.size() == tube.cumulative.size());
  CHECK(std::is_sorted(tube.cumulative.begin(), tube.cumulative.end()));
  for (const auto& v : tube.vertices) CHECK((v[1] == 0.0 || (v[2] == 0.0 && v[3] == 0.0)));
}

TEST_CASE("section radius tuning") {
  ClassifyConfig cfg;
  CHECK(tuned_section_radius(cfg, 4.0, 5.0) <= cfg.section_radius);
  CHECK(tuned_section_radius(cfg, 0.2, 5.0) < 0.2);
  cfg.auto_section_radius = false;
  CHECK(tuned_section_radius(cfg, 0.2, 5.0) == cfg.section_radius);
}

TEST_CASE("basin fractions replay exactly") {
  const auto c = fixtures::direct_set();
  BasinConfig cfg;
  cfg.threads = 1;
  const auto a = basin_fraction(c, CycleId::P14Cycle, 1e-3, 40, 5, cfg);
  cfg.threads = 3;
  const auto b = basin_fraction(c, CycleId::P14Cycle, 1e-3, 40, 5, cfg);
  CHECK(a.counts == b.counts);
  CHECK(samples_to_csv(a) == samples_to_csv(b));
  std::uint64_t total = 0;
  for (auto k : a.counts) total += k;
  CHECK(total == 40);
  CHECK(a.samples.size() == 40);
  CHECK(a.attracted_p13.count == a.counts[0]);
  CHECK(a.attracted_p14.count == a.counts[1]);
  // The direct set's P14 tube drains into the P13 cycle.
  CHECK(a.attracted_p13.count >= 30);
  CHECK(&a.own() == &a.attracted_p14);

  const auto csv = samples_to_csv(a);
  CHECK(csv.rfind("sample,seed,outcome,loops,final_phi\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);

  CHECK(code_of([&] { basin_fraction(c, CycleId::P13Cycle, 1e-3, 0, 5, cfg); }) ==
        ErrorCode::PreconditionViolated);
  CHECK(code_of([&] { basin_fraction(c, CycleId::P13Cycle, 0.0, 10, 5, cfg); }) ==
        ErrorCode::PreconditionViolated);
}

TEST_CASE("index verdicts on synthetic ladders") {
  const auto ladder = default_ladder();
  REQUIRE(ladder.size() == 10);
  CHECK(ladder[0] == 1e-2);
  for (std::size_t i = 1; i < ladder.size(); ++i) CHECK(ladder[i] == doctest::Approx(ladder[i - 1] * 0.5));

  auto make = [&](auto frac) {
    std::vector<IndexLevel> out;
    for (double e : ladder) out.push_back({e, 1000, 0, frac(e)});
    return out;
  };
  std::optional<double> slope;
  CHECK(index_verdict(make([](double) { return 1.0; }), &slope) == IndexVerdict::IndexPlusInfinityLike);
  CHECK(index_verdict(make([](double) { return 0.0; }), &slope) == IndexVerdict::IndexMinusInfinityLike);
  CHECK(index_verdict(make([](double e) { return 3.0 * std::sqrt(e); }), &slope) ==
        IndexVerdict::FiniteIndexLike);
  REQUIRE(slope);
  CHECK(*slope == doctest::Approx(0.5).epsilon(1e-9));
  int i = 0;
  CHECK(index_verdict(make([&](double) { return (i++ % 2) ? 0.2 : 0.6; }), &slope) ==
        IndexVerdict::Inconclusive);
  CHECK(index_verdict({}, &slope) == IndexVerdict::Inconclusive);
}

TEST_CASE("sink control has a full-measure basin") {
  const auto c = fixtures::sink_set();
  const auto eq = compute_equilibria(c);
  const auto lam = eq.b.eigenvalues;
  REQUIRE(*std::max_element(lam.begin(), lam.end()) < 0.0);
  const auto est = stability_index_estimate_sink(c, eq.b.point(), default_ladder(4), 50, 3, 1);
  CHECK(est.verdict == IndexVerdict::IndexPlusInfinityLike);
  for (const auto& l : est.levels) CHECK(l.attracted == 50);
  CHECK_THROWS_AS(stability_index_estimate_sink(c, eq.b.point(), {1e-2, 1e-2}, 5, 3, 1), Error);
}

TEST_CASE("index estimate along a connection") {
  const auto c = fixtures::direct_set();
  const auto conn = verify_connection(c, EquilibriumLabel::XiA, EquilibriumLabel::XiB, SubspaceId::P12);
  REQUIRE(conn.verified);
  BasinConfig cfg;
  cfg.threads = 1;
  const auto a = stability_index_estimate(c, conn, 0.5, CycleId::P13Cycle, default_ladder(3), 10, 4, cfg);
  const auto b = stability_index_estimate(c, conn, 0.5, CycleId::P13Cycle, default_ladder(3), 10, 4, cfg);
  CHECK(to_json(a).dump() == to_json(b).dump());
  REQUIRE(a.levels.size() == 3);
  for (const auto& l : a.levels) CHECK(l.n == 10);
  CHECK(code_of([&] {
          stability_index_estimate(c, conn, 1.5, CycleId::P13Cycle, default_ladder(3), 10, 4, cfg);
        }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("adjudication of the reference set without basins") {
  AdjudicationBudget budget;
  budget.skip_basin = true;
  const auto r = adjudicate(reference_coefficients(), budget);
  CHECK(r.analytic_complete);
  REQUIRE(r.principal);
  CHECK(*r.principal == PrincipalPlane::P14);
  REQUIRE(r.predicted);
  CHECK(*r.predicted == CycleId::P14Cycle);
  CHECK(r.connections_verified);
  CHECK(r.connections.size() == 3);
  CHECK(r.simulated == SimulatedAttractor::Skipped);
  CHECK(r.printed_vs_direct_agree == false);
  CHECK(mentions(r.anomalies, "printed C17 passes"));
  CHECK(mentions(r.anomalies, "0.15559"));
  CHECK(mentions(r.anomalies, "70.47"));
  CHECK(mentions(r.anomalies, "principal plane is P14"));
  CHECK(mentions(r.skipped, "basin"));
  CHECK(r.conditions.hc.status == HypothesisStatus::Pass);
}

TEST_CASE("adjudication stops after a failed existence item") {
  auto c = reference_coefficients();
  c.c1 = 3.0;
  const auto r = adjudicate(c);
  CHECK_FALSE(r.construction.item_i.pass);
  CHECK(r.skipped == std::vector<std::string>{"connections", "basin", "prediction", "simulation"});
  CHECK(r.connections.empty());
  CHECK(r.simulated == SimulatedAttractor::Skipped);
  const auto j = to_json(r);
  CHECK(j["skipped"].size() == 4);
  CHECK(j["simulated_cycle"] == "Skipped");
}

TEST_CASE("adjudication of the direct set") {
  AdjudicationBudget budget;
  budget.samples = 30;
  budget.basin.threads = 1;
  const auto r = adjudicate(fixtures::direct_set(), budget);
  REQUIRE(r.principal);
  CHECK(*r.principal == PrincipalPlane::P13);
  CHECK(r.connections_verified);
  CHECK(r.basins.size() == 4);
  CHECK(r.simulated == SimulatedAttractor::P13Cycle);
  CHECK(r.simulated_attractor_is_principal == true);
  CHECK(mentions(r.anomalies, "principal cycle"));
  for (const auto& b : r.basins) {
    std::uint64_t total = 0;
    for (auto k : b.counts) total += k;
    CHECK(total == 30);
  }
  const auto j = to_json(r);
  for (auto key : {"coefficients", "budget", "conditions", "construction", "principal_plane",
                   "delta_linear", "connections", "basins", "predicted_cycle", "simulated_cycle",
                   "flags", "skipped", "anomalies"})
    CHECK(j.contains(key));
}

TEST_CASE("disagreement between prediction and simulation is an anomaly") {
  AdjudicationBudget budget;
  budget.samples = 30;
  budget.basin.threads = 1;
  const auto r = adjudicate(fixtures::direct_set(), budget);
  REQUIRE(r.predicted);
  CHECK(*r.predicted == CycleId::P14Cycle);
  CHECK(r.prediction_vs_simulation_agree == false);
  CHECK(mentions(r.anomalies, "delta_linear predicts P14 but the simulated attractor is P13cycle"));
}
