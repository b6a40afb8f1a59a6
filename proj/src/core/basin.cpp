#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hetlab/experiments.hpp"
#include "hetlab/parallel.hpp"
#include "hetlab/rng.hpp"

namespace hetlab {

namespace {

constexpr double kZ95 = 1.959963984540054;

StateVector ball_point(const StateVector& center, double eps, SplitMix64& rng) {
  StateVector dir;
  double len = 0.0;
  while (!(len > 0.0)) {
    for (std::size_t i = 0; i < 4; ++i) dir[i] = rng.normal();
    len = dir.norm();
  }
  const double r = eps * std::pow(rng.uniform(), 0.25);
  return center + (r / len) * dir;
}

}  // namespace

StateVector CycleTube::point_at(double arc) const {
  if (vertices.empty()) throw Error(ErrorCode::PreconditionViolated, "empty tube");
  if (arc <= 0.0) return vertices.front();
  if (arc >= length()) return vertices.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), arc);
  const std::size_t j = static_cast<std::size_t>(it - cumulative.begin());
  const double seg = cumulative[j] - cumulative[j - 1];
  const double t = seg > 0.0 ? (arc - cumulative[j - 1]) / seg : 0.0;
  return vertices[j - 1] + t * (vertices[j] - vertices[j - 1]);
}

CycleTube make_cycle_tube(CycleId cycle, const ConnectionRecord& ab, const ConnectionRecord& ba) {
  if (!ab.verified || !ba.verified)
    throw Error(ErrorCode::PreconditionViolated,
                std::string("connections of the ") + std::string(to_string(cycle)) +
                    " cycle are not verified");
  if (ab.carrier != SubspaceId::P12 || ba.carrier != carrier_of(cycle))
    throw Error(ErrorCode::PreconditionViolated, "connection carriers do not match the cycle");
  CycleTube tube;
  tube.cycle = cycle;
  tube.vertices = ab.path;
  tube.vertices.insert(tube.vertices.end(), ba.path.begin(), ba.path.end());
  tube.cumulative.resize(tube.vertices.size());
  tube.cumulative[0] = 0.0;
  for (std::size_t i = 1; i < tube.vertices.size(); ++i)
    tube.cumulative[i] = tube.cumulative[i - 1] + distance(tube.vertices[i], tube.vertices[i - 1]);
  return tube;
}

CycleTube make_cycle_tube(const CoefficientSet& c, CycleId cycle, const ShootingConfig& cfg) {
  const auto ab = verify_connection(c, EquilibriumLabel::XiA, EquilibriumLabel::XiB,
                                    SubspaceId::P12, cfg);
  const auto ba = verify_connection(c, EquilibriumLabel::XiB, EquilibriumLabel::XiA,
                                    carrier_of(cycle), cfg);
  return make_cycle_tube(cycle, ab, ba);
}

double tuned_section_radius(const ClassifyConfig& cfg, double peak_radius_p13,
                            double peak_radius_p14) {
  if (!cfg.auto_section_radius) return cfg.section_radius;
  double peak = std::numeric_limits<double>::infinity();
  for (double p : {peak_radius_p13, peak_radius_p14})
    if (p > 0.0) peak = std::min(peak, p);
  return std::isfinite(peak) ? std::min(cfg.section_radius, 0.5 * peak) : cfg.section_radius;
}

Proportion wilson_interval(std::uint64_t count, std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::PreconditionViolated, "proportion of zero samples");
  if (count > n) throw Error(ErrorCode::PreconditionViolated, "count exceeds sample size");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(count) / nn;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Proportion out;
  out.count = count;
  out.fraction = p;
  // The interval touches 0 (or 1) exactly when the count does; pin it there
  // rather than leave rounding residue.
  out.ci_low = count == 0 ? 0.0 : std::max(0.0, centre - half);
  out.ci_high = count == n ? 1.0 : std::min(1.0, centre + half);
  return out;
}

StateVector sample_ball(const StateVector& center, double eps, std::uint64_t seed,
                        std::uint64_t index) {
  auto rng = SplitMix64::for_sample(seed, index);
  return ball_point(center, eps, rng);
}

BasinReport basin_fraction(const CoefficientSet& c, const CycleTube& tube, double eps,
                           std::size_t n, std::uint64_t seed, const BasinConfig& cfg) {
  if (n == 0) throw Error(ErrorCode::PreconditionViolated, "basin_fraction needs n >= 1");
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw Error(ErrorCode::PreconditionViolated, "basin_fraction needs a positive finite eps");
  if (!(tube.length() > 0.0))
    throw Error(ErrorCode::PreconditionViolated, "cycle tube has zero length");

  std::vector<SampleRecord> samples(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    auto rng = SplitMix64::for_sample(seed, i);
    const StateVector centre = tube.point_at(rng.uniform() * tube.length());
    const StateVector x0 = ball_point(centre, eps, rng);
    const auto cls = classify_trajectory(c, x0, cfg.classify);
    SampleRecord& s = samples[i];
    s.sample = i;
    s.seed = seed ^ i;
    s.outcome = cls.outcome;
    s.loops = static_cast<int>(cls.loops.size());
    s.final_phi = cls.loops.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : cls.loops.back().exit_angle;
  });

  BasinReport rep;
  rep.cycle = tube.cycle;
  rep.eps = eps;
  rep.n = n;
  rep.seed = seed;
  rep.classify = cfg.classify;
  for (const auto& s : samples) ++rep.counts[static_cast<std::size_t>(s.outcome)];
  rep.attracted_p13 = wilson_interval(rep.counts[static_cast<std::size_t>(Outcome::AttractedP13)], n);
  rep.attracted_p14 = wilson_interval(rep.counts[static_cast<std::size_t>(Outcome::AttractedP14)], n);
  if (cfg.keep_samples) rep.samples = std::move(samples);
  return rep;
}

BasinReport basin_fraction(const CoefficientSet& c, CycleId cycle, double eps, std::size_t n,
                           std::uint64_t seed, const BasinConfig& cfg) {
  if (n == 0) throw Error(ErrorCode::PreconditionViolated, "basin_fraction needs n >= 1");
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw Error(ErrorCode::PreconditionViolated, "basin_fraction needs a positive finite eps");

  const auto ab = verify_connection(c, EquilibriumLabel::XiA, EquilibriumLabel::XiB,
                                    SubspaceId::P12, cfg.shooting);
  const auto ba = verify_connection(c, EquilibriumLabel::XiB, EquilibriumLabel::XiA,
                                    carrier_of(cycle), cfg.shooting);
  const CycleTube tube = make_cycle_tube(cycle, ab, ba);

  BasinConfig tuned = cfg;
  if (cfg.classify.auto_section_radius) {
    double other_peak = 0.0;
    const CycleId other = cycle == CycleId::P13Cycle ? CycleId::P14Cycle : CycleId::P13Cycle;
    try {
      const auto o = verify_connection(c, EquilibriumLabel::XiB, EquilibriumLabel::XiA,
                                       carrier_of(other), cfg.shooting);
      if (o.verified) other_peak = o.peak_plane_radius;
    } catch (const Error&) {
    }
    const double own_peak = ba.peak_plane_radius;
    tuned.classify.section_radius =
        cycle == CycleId::P13Cycle ? tuned_section_radius(cfg.classify, own_peak, other_peak)
                                   : tuned_section_radius(cfg.classify, other_peak, own_peak);
  }
  return basin_fraction(c, tube, eps, n, seed, tuned);
}

std::string samples_to_csv(const BasinReport& report) {
  std::string out = "sample,seed,outcome,loops,final_phi\n";
  char buf[160];
  for (const auto& s : report.samples) {
    std::snprintf(buf, sizeof buf, "%zu,%llu,%s,%d,%.17g\n", s.sample,
                  static_cast<unsigned long long>(s.seed), std::string(to_string(s.outcome)).c_str(),
                  s.loops, s.final_phi);
    out += buf;
  }
  return out;
}

}  // namespace hetlab
