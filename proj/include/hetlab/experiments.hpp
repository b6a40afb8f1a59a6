#pragma once

// Numerical experiments on the heteroclinic cycle: shooting along unstable
// directions, loop-by-loop trajectory classification, Monte Carlo basin
// fractions, stability-index estimates, and the end-to-end adjudication.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hetlab/analysis.hpp"
#include "hetlab/integrator.hpp"
#include "hetlab/model.hpp"

namespace hetlab {

enum class CycleId { P13Cycle, P14Cycle };
std::string_view to_string(CycleId id);
SubspaceId carrier_of(CycleId id);

enum class Outcome { AttractedP13, AttractedP14, OtherAttractor, Escaped, Undecided };
inline constexpr std::size_t kOutcomeCount = 5;
std::string_view to_string(Outcome o);

// ---------------------------------------------------------------------------
// Connections

struct ShootingConfig {
  double offset = 1e-5;
  double target_radius = 1e-7;
  IntegratorConfig integrator = [] {
    IntegratorConfig c;
    c.max_time = 5000.0;
    c.stationary_steps = 0;
    return c;
  }();
};

struct ConnectionRecord {
  EquilibriumLabel from = EquilibriumLabel::XiA;
  EquilibriumLabel to = EquilibriumLabel::XiB;
  SubspaceId carrier = SubspaceId::P12;
  double shoot_offset = 0.0;
  bool verified = false;
  double terminal_distance = 0.0;
  double transit_time = 0.0;
  double max_carrier_drift = 0.0;
  // Largest sqrt(x3^2 + x4^2) along the path.
  double peak_plane_radius = 0.0;
  Termination termination = Termination::TimeLimit;
  // Source equilibrium followed by the accepted integration states.
  std::vector<StateVector> path;
};

// Throws NoUnstableDirection when the source has no expanding direction in
// the carrier, PreconditionViolated when the carrier is not flow-invariant.
ConnectionRecord verify_connection(const CoefficientSet& c, EquilibriumLabel from,
                                   EquilibriumLabel to, SubspaceId carrier,
                                   const ShootingConfig& cfg = {});

// ---------------------------------------------------------------------------
// Classification

struct LoopRecord {
  int index = 0;
  double exit_angle = 0.0;  // atan2(|x4|, |x3|) at the plane-radius section
  double min_distance_a = 0.0;
  double min_distance_b = 0.0;
  double duration = 0.0;
};

struct ClassifyConfig {
  double radius_a = 0.1;
  double radius_b = 0.1;
  double section_radius = 0.5;
  double angle_tolerance = 0.01;
  int loops_max = 50;
  int decisive_loops = 3;
  // Distances below this count as shrinking (the state sits on the
  // equilibrium to rounding).
  double distance_floor = 1e-12;
  // A phase waits at most max(floor, factor * longest loop so far).
  double phase_time_floor = 1000.0;
  double phase_time_factor = 10.0;
  // Cap the section radius at this fraction of the smallest peak plane
  // radius of the C_ba connections (when the caller supplies them).
  bool auto_section_radius = true;
  IntegratorConfig integrator = [] {
    IntegratorConfig c;
    c.record = false;
    c.stationary_steps = 0;
    c.max_time = 1e300;
    return c;
  }();
};

struct Classification {
  Outcome outcome = Outcome::Undecided;
  std::vector<LoopRecord> loops;
  double final_time = 0.0;
  StateVector final_state;
  std::string note;
};

Classification classify_trajectory(const CoefficientSet& c, const StateVector& x0,
                                   const ClassifyConfig& cfg = {});

// ---------------------------------------------------------------------------
// Basin fractions

struct CycleTube {
  CycleId cycle = CycleId::P13Cycle;
  std::vector<StateVector> vertices;  // polyline through both connections
  std::vector<double> cumulative;     // arc length at each vertex
  double length() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
  StateVector point_at(double arc) const;
};

// Shoots C_ab and C_ba within the cycle's plane; throws PreconditionViolated
// if either connection fails to verify.
CycleTube make_cycle_tube(const CoefficientSet& c, CycleId cycle, const ShootingConfig& cfg = {});
CycleTube make_cycle_tube(CycleId cycle, const ConnectionRecord& ab, const ConnectionRecord& ba);

// Section radius to use given the peak radii of both C_ba connections.
double tuned_section_radius(const ClassifyConfig& cfg, double peak_radius_p13,
                            double peak_radius_p14);

struct Proportion {
  std::uint64_t count = 0;
  double fraction = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// 95% Wilson score interval.
Proportion wilson_interval(std::uint64_t count, std::uint64_t n);

struct SampleRecord {
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::Undecided;
  int loops = 0;
  double final_phi = 0.0;  // NaN without loops
};

struct BasinConfig {
  ClassifyConfig classify;
  ShootingConfig shooting;
  unsigned threads = 0;
  bool keep_samples = true;
};

struct BasinReport {
  CycleId cycle = CycleId::P13Cycle;
  double eps = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::array<std::uint64_t, kOutcomeCount> counts{};
  Proportion attracted_p13;
  Proportion attracted_p14;
  ClassifyConfig classify;
  std::vector<SampleRecord> samples;

  // Attracted fraction for this report's own cycle.
  const Proportion& own() const {
    return cycle == CycleId::P13Cycle ? attracted_p13 : attracted_p14;
  }
};

// Throws PreconditionViolated for n == 0, eps <= 0, or unverified connections.
BasinReport basin_fraction(const CoefficientSet& c, CycleId cycle, double eps, std::size_t n,
                           std::uint64_t seed, const BasinConfig& cfg = {});
BasinReport basin_fraction(const CoefficientSet& c, const CycleTube& tube, double eps,
                           std::size_t n, std::uint64_t seed, const BasinConfig& cfg);

// Uniform point in the 4-ball of radius eps around center.
StateVector sample_ball(const StateVector& center, double eps, std::uint64_t seed,
                        std::uint64_t index);

std::string samples_to_csv(const BasinReport& report);

// ---------------------------------------------------------------------------
// Stability index estimates

enum class IndexVerdict {
  IndexPlusInfinityLike,
  IndexMinusInfinityLike,
  FiniteIndexLike,
  Inconclusive
};
std::string_view to_string(IndexVerdict v);

struct IndexLevel {
  double eps = 0.0;
  std::size_t n = 0;
  std::uint64_t attracted = 0;
  double fraction = 0.0;
};

struct IndexEstimate {
  StateVector base_point;
  std::string target;
  std::uint64_t seed = 0;
  std::vector<IndexLevel> levels;
  std::optional<double> slope;  // d log(fraction) / d log(eps)
  IndexVerdict verdict = IndexVerdict::Inconclusive;
};

// Geometric ladder, `levels` entries from `start` shrinking by `ratio`.
std::vector<double> default_ladder(std::size_t levels = 10, double start = 1e-2,
                                   double ratio = 0.5);

// Categorical verdict from per-level fractions (ladder order, decreasing eps).
IndexVerdict index_verdict(const std::vector<IndexLevel>& levels, std::optional<double>* slope);

// Generic engine: fraction of eps-ball samples around `base` for which
// `attracted` holds, per ladder level.
IndexEstimate estimate_index(const StateVector& base, const std::vector<double>& ladder,
                             std::size_t n, std::uint64_t seed, unsigned threads,
                             const std::function<bool(const StateVector&)>& attracted,
                             std::string target);

// Point at `arc_fraction` of a verified connection; samples count as
// attracted when they classify into `cycle`. Throws PreconditionViolated.
IndexEstimate stability_index_estimate(const CoefficientSet& c, const ConnectionRecord& conn,
                                       double arc_fraction, CycleId cycle,
                                       const std::vector<double>& ladder, std::size_t n,
                                       std::uint64_t seed, const BasinConfig& cfg = {});

// Control case: a sink equilibrium; samples count as attracted when they
// converge to it.
IndexEstimate stability_index_estimate_sink(const CoefficientSet& c, const StateVector& sink,
                                            const std::vector<double>& ladder, std::size_t n,
                                            std::uint64_t seed, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Adjudication

struct AdjudicationBudget {
  std::vector<double> eps{1e-2, 1e-3};
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  bool skip_basin = false;
  BasinConfig basin;
};

enum class SimulatedAttractor { P13Cycle, P14Cycle, Both, Neither, Skipped };
std::string_view to_string(SimulatedAttractor s);

struct AdjudicationReport {
  CoefficientSet coeffs;
  AdjudicationBudget budget;

  ConditionReport conditions;
  ConstructionReport construction;
  std::optional<PrincipalPlane> principal;
  std::optional<double> delta_linear;  // sign drives the prediction

  bool analytic_complete = false;
  std::vector<ConnectionRecord> connections;  // C_ab, C_ba(P13), C_ba(P14)
  bool connections_verified = false;
  double section_radius = 0.0;
  std::vector<BasinReport> basins;

  std::optional<CycleId> predicted;
  SimulatedAttractor simulated = SimulatedAttractor::Skipped;
  std::optional<bool> printed_vs_direct_agree;
  std::optional<bool> prediction_vs_simulation_agree;
  std::optional<bool> simulated_attractor_is_principal;

  std::vector<std::string> skipped;  // names of skipped sections
  std::vector<std::string> anomalies;
};

AdjudicationReport adjudicate(const CoefficientSet& c, const AdjudicationBudget& budget = {});

}  // namespace hetlab
