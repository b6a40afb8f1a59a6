#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hetlab/experiments.hpp"

namespace hetlab {

namespace {

enum class Phase { ToB, ToSection, ToA };

// Decision from the exit angles of the last `k` loops, if they agree.
std::optional<Outcome> angle_verdict(const std::vector<LoopRecord>& loops, std::size_t k,
                                     double tol) {
  if (loops.size() < k || k == 0) return std::nullopt;
  const auto first = loops.end() - static_cast<std::ptrdiff_t>(k);
  const bool p13 = std::all_of(first, loops.end(),
                               [&](const LoopRecord& l) { return l.exit_angle < tol; });
  const bool p14 = std::all_of(first, loops.end(), [&](const LoopRecord& l) {
    return l.exit_angle > std::numbers::pi / 2 - tol;
  });
  if (p13) return Outcome::AttractedP13;
  if (p14) return Outcome::AttractedP14;
  return std::nullopt;
}

bool shrinking(const std::vector<LoopRecord>& loops, std::size_t k, double floor) {
  const std::size_t n = loops.size();
  for (std::size_t i = n - k + 1; i < n; ++i) {
    const auto& prev = loops[i - 1];
    const auto& cur = loops[i];
    const bool a_ok = cur.min_distance_a <= prev.min_distance_a || cur.min_distance_a < floor;
    const bool b_ok = cur.min_distance_b <= prev.min_distance_b || cur.min_distance_b < floor;
    if (!a_ok || !b_ok) return false;
  }
  return true;
}

}  // namespace

Classification classify_trajectory(const CoefficientSet& c, const StateVector& x0,
                                   const ClassifyConfig& cfg) {
  if (!(cfg.radius_a > 0.0) || !(cfg.radius_b > 0.0) || !(cfg.section_radius > 0.0))
    throw Error(ErrorCode::Config, "classification radii must be positive");
  if (cfg.loops_max < 1 || cfg.decisive_loops < 1)
    throw Error(ErrorCode::Config, "loops_max and decisive_loops must be >= 1");
  if (!x0.all_finite()) throw Error(ErrorCode::Domain, "initial state is not finite");

  const auto [xa, xb] = quadratic_roots(c);
  const StateVector pa{xa, 0, 0, 0};
  const StateVector pb{xb, 0, 0, 0};

  IntegratorConfig icfg = cfg.integrator;
  icfg.record = false;
  Solver solver(c, x0, icfg);

  const SectionSpec to_b = SectionSpec::enter_ball(pb, cfg.radius_b);
  const SectionSpec to_a = SectionSpec::enter_ball(pa, cfg.radius_a);
  const SectionSpec section = SectionSpec::radius_in_plane(cfg.section_radius);

  Classification out;
  double min_a = distance(x0, pa);
  double min_b = distance(x0, pb);
  double loop_start = 0.0;
  double longest_loop = 0.0;
  const StepObserver track = [&](const DenseStep& s) {
    min_a = std::min(min_a, distance(s.y1, pa));
    min_b = std::min(min_b, distance(s.y1, pb));
  };

  auto finish = [&](Outcome o, std::string note) {
    out.outcome = o;
    out.note = std::move(note);
    out.final_time = solver.time();
    out.final_state = solver.state();
    return out;
  };

  const std::size_t k = static_cast<std::size_t>(cfg.decisive_loops);
  Phase phase = Phase::ToB;
  for (;;) {
    const SectionSpec& target =
        phase == Phase::ToB ? to_b : (phase == Phase::ToSection ? section : to_a);
    const double limit = std::max(cfg.phase_time_floor, cfg.phase_time_factor * longest_loop);
    Termination reason = Termination::TimeLimit;
    const auto ev = advance_to_section(solver, target, solver.time() + limit, &reason, track);

    if (!ev) {
      switch (reason) {
        case Termination::Blowup:
          return finish(Outcome::Escaped, "norm exceeded the blow-up threshold");
        case Termination::ConvergedToPoint:
          return finish(Outcome::OtherAttractor, "converged to a stable equilibrium");
        case Termination::StepLimit:
          return finish(Outcome::Undecided, "integrator step limit");
        default:
          break;
      }
      const StateVector& x = solver.state();
      if (distance(x, pa) < cfg.radius_a || distance(x, pb) < cfg.radius_b) {
        // The orbit stalls at an equilibrium: loop times grow without bound.
        if (out.loops.size() >= 2) {
          const std::size_t m = std::min<std::size_t>(k, out.loops.size());
          if (auto v = angle_verdict(out.loops, m, cfg.angle_tolerance))
            return finish(*v, "collapsed onto the cycle");
        }
        return finish(Outcome::Undecided, "stalled near an equilibrium");
      }
      return finish(Outcome::OtherAttractor, "phase timeout away from the cycle");
    }

    if (phase == Phase::ToSection) {
      LoopRecord loop;
      loop.index = static_cast<int>(out.loops.size());
      const StateVector& x = ev->state;
      loop.exit_angle = std::atan2(std::abs(x[3]), std::abs(x[2]));
      loop.min_distance_a = min_a;
      loop.min_distance_b = min_b;
      loop.duration = ev->time - loop_start;
      out.loops.push_back(loop);
      longest_loop = std::max(longest_loop, loop.duration);
      loop_start = ev->time;
      min_a = distance(x, pa);
      min_b = distance(x, pb);

      if (out.loops.size() >= k) {
        if (auto v = angle_verdict(out.loops, k, cfg.angle_tolerance);
            v && shrinking(out.loops, k, cfg.distance_floor))
          return finish(*v, "decisive");
      }
      if (static_cast<int>(out.loops.size()) >= cfg.loops_max)
        return finish(Outcome::Undecided, "loop limit reached");
    }
    phase = phase == Phase::ToB ? Phase::ToSection
                                : (phase == Phase::ToSection ? Phase::ToA : Phase::ToB);
  }
}

}  // namespace hetlab
