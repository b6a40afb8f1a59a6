#include <algorithm>
#include <cmath>

#include "hetlab/experiments.hpp"
#include "hetlab/parallel.hpp"

namespace hetlab {

namespace {

constexpr double kAllTol = 1e-3;       // fraction within this of 0 or 1 counts as all/none
constexpr std::size_t kTailLevels = 3;  // smallest levels used for the all/none verdicts
constexpr std::size_t kSlopeLevels = 5;
constexpr double kSlopeSpread = 0.2;

}  // namespace

std::string_view to_string(IndexVerdict v) {
  switch (v) {
    case IndexVerdict::IndexPlusInfinityLike: return "IndexPlusInfinityLike";
    case IndexVerdict::IndexMinusInfinityLike: return "IndexMinusInfinityLike";
    case IndexVerdict::FiniteIndexLike: return "FiniteIndexLike";
    case IndexVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::vector<double> default_ladder(std::size_t levels, double start, double ratio) {
  if (levels == 0 || !(start > 0.0) || !(ratio > 0.0 && ratio < 1.0))
    throw Error(ErrorCode::Config, "ladder needs levels >= 1, start > 0 and 0 < ratio < 1");
  std::vector<double> out(levels);
  double e = start;
  for (auto& v : out) {
    v = e;
    e *= ratio;
  }
  return out;
}

IndexVerdict index_verdict(const std::vector<IndexLevel>& levels, std::optional<double>* slope) {
  if (slope) slope->reset();
  if (levels.empty()) return IndexVerdict::Inconclusive;

  const std::size_t k = std::min(kTailLevels, levels.size());
  const auto tail = levels.end() - static_cast<std::ptrdiff_t>(k);
  if (std::all_of(tail, levels.end(), [](const IndexLevel& l) { return l.fraction >= 1.0 - kAllTol; }))
    return IndexVerdict::IndexPlusInfinityLike;
  if (std::all_of(tail, levels.end(), [](const IndexLevel& l) { return l.fraction <= kAllTol; }))
    return IndexVerdict::IndexMinusInfinityLike;

  if (levels.size() < kSlopeLevels) return IndexVerdict::Inconclusive;
  const auto first = levels.end() - static_cast<std::ptrdiff_t>(kSlopeLevels);
  if (!std::all_of(first, levels.end(),
                   [](const IndexLevel& l) { return l.fraction > 0.0 && l.fraction < 1.0; }))
    return IndexVerdict::Inconclusive;

  // Least-squares slope of log(fraction) against log(eps), then require each
  // consecutive local slope to stay within the spread of it.
  std::vector<double> lx, ly;
  for (auto it = first; it != levels.end(); ++it) {
    lx.push_back(std::log(it->eps));
    ly.push_back(std::log(it->fraction));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) return IndexVerdict::Inconclusive;
  const double fit = (n * sxy - sx * sy) / denom;
  if (slope) *slope = fit;
  if (!(std::abs(fit) > 0.0)) return IndexVerdict::Inconclusive;
  for (std::size_t i = 1; i < lx.size(); ++i) {
    const double local = (ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]);
    if (std::abs(local - fit) > kSlopeSpread * std::abs(fit)) return IndexVerdict::Inconclusive;
  }
  return IndexVerdict::FiniteIndexLike;
}

IndexEstimate estimate_index(const StateVector& base, const std::vector<double>& ladder,
                             std::size_t n, std::uint64_t seed, unsigned threads,
                             const std::function<bool(const StateVector&)>& attracted,
                             std::string target) {
  if (n == 0) throw Error(ErrorCode::PreconditionViolated, "index estimate needs n >= 1");
  if (ladder.empty()) throw Error(ErrorCode::Config, "empty eps ladder");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0) || !std::isfinite(ladder[i]))
      throw Error(ErrorCode::Config, "ladder entries must be positive and finite");
    if (i > 0 && !(ladder[i] < ladder[i - 1]))
      throw Error(ErrorCode::Config, "ladder must be strictly decreasing");
  }

  IndexEstimate est;
  est.base_point = base;
  est.target = std::move(target);
  est.seed = seed;
  for (std::size_t lvl = 0; lvl < ladder.size(); ++lvl) {
    std::vector<char> hit(n, 0);
    // Distinct streams per level: the level index occupies the high bits.
    const std::uint64_t level_seed = seed ^ (static_cast<std::uint64_t>(lvl) << 40);
    parallel_for(n, threads, [&](std::size_t i) {
      hit[i] = attracted(sample_ball(base, ladder[lvl], level_seed, i)) ? 1 : 0;
    });
    IndexLevel level;
    level.eps = ladder[lvl];
    level.n = n;
    level.attracted = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
    level.fraction = static_cast<double>(level.attracted) / static_cast<double>(n);
    est.levels.push_back(level);
  }
  est.verdict = index_verdict(est.levels, &est.slope);
  return est;
}

IndexEstimate stability_index_estimate(const CoefficientSet& c, const ConnectionRecord& conn,
                                       double arc_fraction, CycleId cycle,
                                       const std::vector<double>& ladder, std::size_t n,
                                       std::uint64_t seed, const BasinConfig& cfg) {
  if (!conn.verified || conn.path.size() < 2)
    throw Error(ErrorCode::PreconditionViolated, "index estimate needs a verified connection");
  if (!(arc_fraction > 0.0 && arc_fraction < 1.0))
    throw Error(ErrorCode::PreconditionViolated, "arc_fraction must lie in (0, 1)");

  CycleTube along;
  along.cycle = cycle;
  along.vertices = conn.path;
  along.cumulative.assign(conn.path.size(), 0.0);
  for (std::size_t i = 1; i < conn.path.size(); ++i)
    along.cumulative[i] = along.cumulative[i - 1] + distance(conn.path[i], conn.path[i - 1]);
  const StateVector base = along.point_at(arc_fraction * along.length());

  const Outcome want = cycle == CycleId::P13Cycle ? Outcome::AttractedP13 : Outcome::AttractedP14;
  const ClassifyConfig ccfg = cfg.classify;
  return estimate_index(
      base, ladder, n, seed, cfg.threads,
      [&](const StateVector& x) { return classify_trajectory(c, x, ccfg).outcome == want; },
      std::string(to_string(cycle)) + " cycle");
}

IndexEstimate stability_index_estimate_sink(const CoefficientSet& c, const StateVector& sink,
                                            const std::vector<double>& ladder, std::size_t n,
                                            std::uint64_t seed, unsigned threads) {
  if (!(eval_field(c, sink).norm() < 1e-9))
    throw Error(ErrorCode::PreconditionViolated, "control point is not an equilibrium");
  IntegratorConfig icfg;
  icfg.record = false;
  icfg.max_time = 200.0;
  icfg.stationary_steps = 0;
  const double capture = 1e-6;
  return estimate_index(
      sink, ladder, n, seed, threads,
      [&](const StateVector& x) {
        const auto tr = integrate(c, x, icfg);
        return tr.reason != Termination::Blowup && distance(tr.final_state(), sink) < capture;
      },
      "sink equilibrium");
}

}  // namespace hetlab
