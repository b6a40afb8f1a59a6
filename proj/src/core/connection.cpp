#include <algorithm>
#include <cmath>

#include "hetlab/experiments.hpp"

namespace hetlab {

std::string_view to_string(CycleId id) { return id == CycleId::P13Cycle ? "P13" : "P14"; }

SubspaceId carrier_of(CycleId id) {
  return id == CycleId::P13Cycle ? SubspaceId::P13 : SubspaceId::P14;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::AttractedP13: return "AttractedP13";
    case Outcome::AttractedP14: return "AttractedP14";
    case Outcome::OtherAttractor: return "OtherAttractor";
    case Outcome::Escaped: return "Escaped";
    case Outcome::Undecided: return "Undecided";
  }
  return "?";
}

namespace {

std::size_t transverse_axis(SubspaceId carrier) {
  switch (carrier) {
    case SubspaceId::P12: return 1;
    case SubspaceId::P13: return 2;
    case SubspaceId::P14: return 3;
    default:
      throw Error(ErrorCode::PreconditionViolated,
                  "connections are shot within P12, P13 or P14, not " +
                      std::string(to_string(carrier)));
  }
}

StateVector equilibrium_point(const CoefficientSet& c, EquilibriumLabel label) {
  const auto [xa, xb] = quadratic_roots(c);
  return {label == EquilibriumLabel::XiA ? xa : xb, 0.0, 0.0, 0.0};
}

}  // namespace

ConnectionRecord verify_connection(const CoefficientSet& c, EquilibriumLabel from,
                                   EquilibriumLabel to, SubspaceId carrier,
                                   const ShootingConfig& cfg) {
  if (!(cfg.offset > 0.0) || !(cfg.target_radius > 0.0))
    throw Error(ErrorCode::Config, "shooting offset and target radius must be positive");
  if (from == to) throw Error(ErrorCode::PreconditionViolated, "connection needs two equilibria");
  const std::size_t axis = transverse_axis(carrier);

  const StateVector src = equilibrium_point(c, from);
  const StateVector dst = equilibrium_point(c, to);
  const auto lambda = eigenvalues_on_axis(c, src[0]);
  if (!(lambda[axis] > 0.0))
    throw Error(ErrorCode::NoUnstableDirection,
                std::string(to_string(from)) + " has no expanding direction along x" +
                    std::to_string(axis + 1) + " (eigenvalue " + std::to_string(lambda[axis]) +
                    ")");

  ConnectionRecord rec;
  rec.from = from;
  rec.to = to;
  rec.carrier = carrier;
  rec.shoot_offset = cfg.offset;

  IntegratorConfig icfg = cfg.integrator;
  icfg.record = true;
  const StateVector x0 = src + cfg.offset * unit_vector(axis);
  const auto res = integrate_to_section(c, x0, SectionSpec::enter_ball(dst, cfg.target_radius), icfg);

  rec.path.reserve(res.trajectory.states.size() + 1);
  rec.path.push_back(src);
  for (const auto& s : res.trajectory.states) {
    rec.path.push_back(s);
    rec.max_carrier_drift = std::max(rec.max_carrier_drift, subspace_distance(carrier, s));
    rec.peak_plane_radius = std::max(rec.peak_plane_radius, std::hypot(s[2], s[3]));
  }
  rec.termination = res.trajectory.reason;
  const StateVector& last = res.event ? res.event->state : res.trajectory.final_state();
  rec.terminal_distance = distance(last, dst);
  rec.transit_time = res.event ? res.event->time : res.trajectory.final_time();
  rec.verified = res.event.has_value() && rec.max_carrier_drift <= 1e-9;
  return rec;
}

}  // namespace hetlab
