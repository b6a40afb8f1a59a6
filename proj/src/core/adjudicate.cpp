#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hetlab/experiments.hpp"

namespace hetlab {

namespace {

// A cycle attracts when some samples land on it and the upper 95% bound of
// its fraction reaches this level.
constexpr double kAttractThreshold = 0.01;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ConnectionRecord shoot(const CoefficientSet& c, EquilibriumLabel from, EquilibriumLabel to,
                       SubspaceId carrier, const ShootingConfig& cfg, std::string* failure) {
  try {
    return verify_connection(c, from, to, carrier, cfg);
  } catch (const Error& e) {
    ConnectionRecord rec;
    rec.from = from;
    rec.to = to;
    rec.carrier = carrier;
    rec.shoot_offset = cfg.offset;
    *failure = e.what();
    return rec;
  }
}

}  // namespace

std::string_view to_string(SimulatedAttractor s) {
  switch (s) {
    case SimulatedAttractor::P13Cycle: return "P13cycle";
    case SimulatedAttractor::P14Cycle: return "P14cycle";
    case SimulatedAttractor::Both: return "Both";
    case SimulatedAttractor::Neither: return "Neither";
    case SimulatedAttractor::Skipped: return "Skipped";
  }
  return "?";
}

AdjudicationReport adjudicate(const CoefficientSet& c, const AdjudicationBudget& budget) {
  if (budget.samples == 0) throw Error(ErrorCode::Config, "budget needs samples >= 1");
  for (double e : budget.eps)
    if (!(e > 0.0) || !std::isfinite(e)) throw Error(ErrorCode::Config, "budget eps must be positive");

  AdjudicationReport r;
  r.coeffs = c;
  r.budget = budget;
  r.construction = check_construction(c);
  r.conditions = check_all(c);
  r.principal = r.construction.principal;

  if (!r.construction.item_i.pass) {
    r.skipped = {"connections", "basin", "prediction", "simulation"};
    return r;
  }
  r.analytic_complete = r.conditions.hypotheses_populated;

  // Printed form of the expansion/contraction condition against its direct form.
  if (r.conditions.hypotheses_populated) {
    r.delta_linear = r.conditions.delta_linear;
    const ConditionRow* c17 = r.conditions.row("C17");
    const auto& direct = r.conditions.condition3_direct;
    if (c17) {
      r.printed_vs_direct_agree = c17->pass == direct.pass;
      if (!*r.printed_vs_direct_agree)
        r.anomalies.push_back(
            "printed C17 " + std::string(c17->pass ? "passes" : "fails") + " (" + fmt(c17->lhs) +
            " vs " + fmt(c17->rhs) + ") but the direct condition " +
            (direct.pass ? "passes" : "fails") + " (contraction product " +
            fmt(direct.contraction_product) + " vs expansion product " +
            fmt(direct.expansion_product) + ")");
    }
    if (r.conditions.delta_linear > 0.0)
      r.predicted = CycleId::P14Cycle;
    else if (r.conditions.delta_linear < 0.0)
      r.predicted = CycleId::P13Cycle;
  }
  if (!r.predicted) r.skipped.push_back("prediction");
  if (r.principal && *r.principal != PrincipalPlane::P13)
    r.anomalies.push_back("principal plane is " + std::string(to_string(*r.principal)) +
                          ", not P13");

  // Connections.
  const ShootingConfig& sc = budget.basin.shooting;
  std::string fail_ab, fail_13, fail_14;
  r.connections.push_back(
      shoot(c, EquilibriumLabel::XiA, EquilibriumLabel::XiB, SubspaceId::P12, sc, &fail_ab));
  r.connections.push_back(
      shoot(c, EquilibriumLabel::XiB, EquilibriumLabel::XiA, SubspaceId::P13, sc, &fail_13));
  r.connections.push_back(
      shoot(c, EquilibriumLabel::XiB, EquilibriumLabel::XiA, SubspaceId::P14, sc, &fail_14));
  const auto& ab = r.connections[0];
  const auto& ba13 = r.connections[1];
  const auto& ba14 = r.connections[2];
  r.connections_verified = ab.verified && ba13.verified && ba14.verified;
  r.conditions = check_all(c, r.connections_verified);
  for (const auto& [conn, why] :
       {std::pair{&ab, &fail_ab}, std::pair{&ba13, &fail_13}, std::pair{&ba14, &fail_14}}) {
    if (!conn->verified)
      r.anomalies.push_back("connection " + std::string(to_string(conn->from)) + " -> " +
                            std::string(to_string(conn->to)) + " in " +
                            std::string(to_string(conn->carrier)) + " not verified" +
                            (why->empty() ? "" : ": " + *why));
  }

  BasinConfig bcfg = budget.basin;
  bcfg.classify.section_radius = tuned_section_radius(
      budget.basin.classify, ba13.verified ? ba13.peak_plane_radius : 0.0,
      ba14.verified ? ba14.peak_plane_radius : 0.0);
  r.section_radius = bcfg.classify.section_radius;

  if (budget.skip_basin || budget.eps.empty()) {
    r.skipped.push_back("basin");
    r.skipped.push_back("simulation");
    return r;
  }

  std::vector<double> eps = budget.eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (eps.size() > 2) eps.erase(eps.begin(), eps.end() - 2);

  std::optional<bool> attracts13, attracts14;
  for (CycleId cycle : {CycleId::P13Cycle, CycleId::P14Cycle}) {
    const auto& ba = cycle == CycleId::P13Cycle ? ba13 : ba14;
    if (!ab.verified || !ba.verified) continue;
    const CycleTube tube = make_cycle_tube(cycle, ab, ba);
    for (double e : eps) {
      r.basins.push_back(basin_fraction(c, tube, e, budget.samples, budget.seed, bcfg));
      // The smallest eps runs last and decides.
      const Proportion& own = r.basins.back().own();
      const bool hit = own.count > 0 && own.ci_high >= kAttractThreshold;
      (cycle == CycleId::P13Cycle ? attracts13 : attracts14) = hit;
    }
  }

  if (!attracts13 && !attracts14) {
    r.skipped.push_back("simulation");
    return r;
  }
  const bool a13 = attracts13.value_or(false);
  const bool a14 = attracts14.value_or(false);
  r.simulated = a13 && a14 ? SimulatedAttractor::Both
              : a13        ? SimulatedAttractor::P13Cycle
              : a14        ? SimulatedAttractor::P14Cycle
                           : SimulatedAttractor::Neither;

  if (r.predicted) {
    const auto want = *r.predicted == CycleId::P13Cycle ? SimulatedAttractor::P13Cycle
                                                        : SimulatedAttractor::P14Cycle;
    r.prediction_vs_simulation_agree = r.simulated == want;
    if (!*r.prediction_vs_simulation_agree)
      r.anomalies.push_back("delta_linear predicts " + std::string(to_string(*r.predicted)) +
                            " but the simulated attractor is " + std::string(to_string(r.simulated)));
  }
  if (r.principal && *r.principal != PrincipalPlane::Tie &&
      (r.simulated == SimulatedAttractor::P13Cycle || r.simulated == SimulatedAttractor::P14Cycle)) {
    const bool p13 = r.simulated == SimulatedAttractor::P13Cycle;
    r.simulated_attractor_is_principal = p13 == (*r.principal == PrincipalPlane::P13);
    if (*r.simulated_attractor_is_principal)
      r.anomalies.push_back("the simulated attractor is the principal cycle (" +
                            std::string(to_string(*r.principal)) + ")");
  }
  if (r.simulated == SimulatedAttractor::Neither) {
    std::string msg = "neither cycle attracts at tested eps = " + fmt(eps.back());
    const bool bounded = std::all_of(r.basins.begin(), r.basins.end(), [&](const BasinReport& b) {
      return b.eps != eps.back() || b.own().ci_high < kAttractThreshold;
    });
    msg += bounded ? ": upper confidence bounds below " + fmt(kAttractThreshold)
                   : ": no attracted samples, but n is too small to bound the fractions below " +
                         fmt(kAttractThreshold);
    r.anomalies.push_back(msg);
  }
  return r;
}

}  // namespace hetlab
