#include "hetlab/integrator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hetlab {

namespace {

// Dormand-Prince 5(4) tableau (nodes 1/5, 3/10, 4/5, 8/9, 1, 1).
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Difference between the fifth- and fourth-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMaxShrink = 5.0;   // h may shrink by at most this factor
constexpr double kMaxGrowth = 10.0;  // ... and grow by at most this one

bool sink_spectrum(const CoefficientSet& c, const StateVector& x) {
  const Matrix4 J = eval_jacobian(c, x);
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::EigenSolver<Eigen::Matrix4d> es(m, false);
  for (int i = 0; i < 4; ++i)
    if (!(es.eigenvalues()[i].real() < 0.0)) return false;
  return true;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw Error(ErrorCode::Config, "tolerances must be positive");
  if (!(initial_step > 0.0) || !(max_step > 0.0))
    throw Error(ErrorCode::Config, "step sizes must be positive");
  if (!(max_time >= 0.0) || !std::isfinite(max_time))
    throw Error(ErrorCode::Config, "max_time must be a nonnegative finite number");
  if (max_steps < 1) throw Error(ErrorCode::Config, "max_steps must be >= 1");
  if (!(blowup_norm > 0.0)) throw Error(ErrorCode::Config, "blowup_norm must be positive");
  if (fixed_step && !(*fixed_step > 0.0))
    throw Error(ErrorCode::Config, "fixed_step must be positive");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::TimeLimit: return "TimeLimit";
    case Termination::StepLimit: return "StepLimit";
    case Termination::EventHit: return "EventHit";
    case Termination::Blowup: return "Blowup";
    case Termination::ConvergedToPoint: return "ConvergedToPoint";
  }
  return "?";
}

StateVector DenseStep::at(double t) const {
  const double h = t1 - t0;
  const double theta = h > 0.0 ? (t - t0) / h : 1.0;
  const double theta1 = 1.0 - theta;
  StateVector y;
  for (std::size_t i = 0; i < 4; ++i) {
    y[i] = coeff_[0][i] +
           theta * (coeff_[1][i] +
                    theta1 * (coeff_[2][i] + theta * (coeff_[3][i] + theta1 * coeff_[4][i])));
  }
  return y;
}

Solver::Solver(const CoefficientSet& coeffs, const StateVector& x0, IntegratorConfig cfg,
               double t0)
    : coeffs_(coeffs), cfg_(std::move(cfg)), t_(t0), y_(x0) {
  cfg_.validate();
  if (!coeffs.all_finite()) throw Error(ErrorCode::Domain, "non-finite coefficient");
  if (!x0.all_finite()) throw Error(ErrorCode::Domain, "non-finite initial state");
  k1_ = eval_field_unchecked(coeffs_, y_);
  h_ = cfg_.fixed_step ? *cfg_.fixed_step : std::min(cfg_.initial_step, cfg_.max_step);
  blowup_ = y_.norm() > cfg_.blowup_norm;
}

std::optional<Termination> Solver::terminal_condition() const {
  if (blowup_ || !y_.all_finite()) return Termination::Blowup;
  if (accepted_ + rejected_ >= cfg_.max_steps) return Termination::StepLimit;
  if (k1_.norm() < cfg_.convergence_field_norm) {
    if (cfg_.stationary_steps > 0 && stationary_run_ >= cfg_.stationary_steps)
      return Termination::ConvergedToPoint;
    if (sink_spectrum(coeffs_, y_)) return Termination::ConvergedToPoint;
  }
  return std::nullopt;
}

std::optional<DenseStep> Solver::step(double t_end) {
  const double eps = std::numeric_limits<double>::epsilon();
  while (t_ < t_end) {
    if (accepted_ + rejected_ >= cfg_.max_steps) return std::nullopt;

    double h = cfg_.fixed_step ? *cfg_.fixed_step : std::min(h_, cfg_.max_step);
    bool final_step = false;
    if (t_ + h >= t_end || t_end - (t_ + h) <= 16.0 * eps * std::max(1.0, std::abs(t_end))) {
      h = t_end - t_;
      final_step = true;
    }
    if (h <= 16.0 * eps * std::max(1.0, std::abs(t_))) {
      // Step size underflow: treat as exhausted.
      rejected_ = cfg_.max_steps;
      return std::nullopt;
    }

    const StateVector& y = y_;
    const StateVector& k1 = k1_;
    const StateVector k2 = eval_field_unchecked(coeffs_, y + (h * a21) * k1);
    const StateVector k3 = eval_field_unchecked(coeffs_, y + h * (a31 * k1 + a32 * k2));
    const StateVector k4 =
        eval_field_unchecked(coeffs_, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const StateVector k5 =
        eval_field_unchecked(coeffs_, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const StateVector k6 = eval_field_unchecked(
        coeffs_, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const StateVector y1 =
        y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const StateVector k7 = eval_field_unchecked(coeffs_, y1);

    double err_ratio = 0.0;
    if (!cfg_.fixed_step) {
      const StateVector err =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double scale = cfg_.abs_tol + cfg_.rel_tol * std::max(y.norm(), y1.norm());
      err_ratio = err.norm() / scale;
      if (!std::isfinite(err_ratio)) err_ratio = 1e10;
    }

    if (cfg_.fixed_step || err_ratio <= 1.0) {
      DenseStep ds;
      ds.t0 = t_;
      ds.t1 = final_step ? t_end : t_ + h;
      ds.y0 = y;
      ds.y1 = y1;
      const StateVector diff = y1 - y;
      const StateVector bspl = h * k1 - diff;
      ds.coeff_[0] = y;
      ds.coeff_[1] = diff;
      ds.coeff_[2] = bspl;
      ds.coeff_[3] = diff - h * k7 - bspl;
      ds.coeff_[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

      if (!cfg_.fixed_step) {
        const double fac11 = std::pow(std::max(err_ratio, 1e-300), kExpo);
        double fac = fac11 / std::pow(err_old_, kBeta);
        fac = std::clamp(fac / kSafety, 1.0 / kMaxGrowth, kMaxShrink);
        double h_new = h / fac;
        if (last_rejected_) h_new = std::min(h_new, h);
        err_old_ = std::max(err_ratio, 1e-4);
        // Keep the controller's step when the final step was clipped short.
        h_ = final_step ? std::max(h_new, h_) : h_new;
      }
      last_rejected_ = false;
      t_ = ds.t1;
      y_ = y1;
      k1_ = k7;
      ++accepted_;
      stationary_run_ = k7.norm() < cfg_.convergence_field_norm ? stationary_run_ + 1 : 0;
      blowup_ = !y_.all_finite() || y_.norm() > cfg_.blowup_norm;
      return ds;
    }

    const double fac11 = std::pow(err_ratio, kExpo);
    h_ = h / std::min(kMaxShrink, fac11 / kSafety);
    last_rejected_ = true;
    ++rejected_;
  }
  return std::nullopt;
}

Trajectory integrate(const CoefficientSet& coeffs, const StateVector& x0,
                     const IntegratorConfig& cfg, const StepObserver& observer) {
  Solver solver(coeffs, x0, cfg);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  for (;;) {
    if (auto term = solver.terminal_condition()) {
      traj.reason = *term;
      break;
    }
    auto step = solver.step(cfg.max_time);
    if (!step) {
      traj.reason = solver.time() >= cfg.max_time ? Termination::TimeLimit : Termination::StepLimit;
      break;
    }
    if (observer) observer(*step);
    if (cfg.record) {
      traj.times.push_back(step->t1);
      traj.states.push_back(step->y1);
    }
  }
  if (!cfg.record && traj.times.back() != solver.time()) {
    traj.times.push_back(solver.time());
    traj.states.push_back(solver.state());
  }
  traj.accepted_steps = solver.accepted_steps();
  traj.rejected_steps = solver.rejected_steps();
  return traj;
}

SectionSpec SectionSpec::enter_ball(const StateVector& center, double radius) {
  SectionSpec s;
  s.id = "EnterBall";
  s.g = [center, radius](const StateVector& x) { return distance(x, center) - radius; };
  s.direction = -1;
  return s;
}

SectionSpec SectionSpec::radius_in_plane(double h) {
  SectionSpec s;
  s.id = "RadiusInPlane";
  s.g = [h](const StateVector& x) { return std::hypot(x[2], x[3]) - h; };
  s.direction = +1;
  return s;
}

double event_tolerance(const StateVector& x) { return 1e-10 * (1.0 + x.norm()); }

namespace {

bool crossed(int direction, double g_prev, double g_next) {
  if (direction < 0) return g_prev > 0.0 && g_next <= 0.0;
  if (direction > 0) return g_prev < 0.0 && g_next >= 0.0;
  return (g_prev < 0.0) != (g_next < 0.0) || g_next == 0.0;
}

bool beyond(int direction, double g) {
  if (direction < 0) return g <= 0.0;
  if (direction > 0) return g >= 0.0;
  return g == 0.0;
}

SectionEvent locate(const DenseStep& step, const SectionSpec& section, double lo, double hi) {
  double g_lo = section.g(step.at(lo));
  StateVector x_hi = step.at(hi);
  double g_hi = section.g(x_hi);
  SectionEvent ev{section.id, hi, x_hi, g_hi > g_lo ? 1 : -1};
  if (std::abs(g_hi) <= event_tolerance(x_hi)) return ev;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const StateVector x_mid = step.at(mid);
    const double g_mid = section.g(x_mid);
    if (std::abs(g_mid) <= event_tolerance(x_mid)) {
      ev.time = mid;
      ev.state = x_mid;
      return ev;
    }
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
      x_hi = x_mid;
    }
    if (!(hi > lo)) break;
  }
  ev.time = hi;
  ev.state = x_hi;
  return ev;
}

}  // namespace

std::optional<SectionEvent> advance_to_section(Solver& solver, const SectionSpec& section,
                                               double t_end, Termination* reason,
                                               const StepObserver& observer,
                                               Trajectory* trajectory) {
  auto set_reason = [&](Termination t) {
    if (reason) *reason = t;
  };

  double g_prev = section.g(solver.state());
  if (beyond(section.direction, g_prev)) {
    set_reason(Termination::EventHit);
    return SectionEvent{section.id, solver.time(), solver.state(), section.direction};
  }

  constexpr std::array<double, 4> kProbe{0.25, 0.5, 0.75, 1.0};
  for (;;) {
    if (auto term = solver.terminal_condition()) {
      set_reason(*term);
      return std::nullopt;
    }
    auto step = solver.step(t_end);
    if (!step) {
      set_reason(solver.time() >= t_end ? Termination::TimeLimit : Termination::StepLimit);
      return std::nullopt;
    }
    if (observer) observer(*step);

    double t_prev = step->t0;
    for (double theta : kProbe) {
      const double t_next = theta == 1.0 ? step->t1 : step->t0 + theta * (step->t1 - step->t0);
      const double g_next = section.g(theta == 1.0 ? step->y1 : step->at(t_next));
      if (crossed(section.direction, g_prev, g_next)) {
        SectionEvent ev = locate(*step, section, t_prev, t_next);
        if (section.direction != 0) ev.direction = section.direction;
        if (trajectory) {
          trajectory->times.push_back(ev.time);
          trajectory->states.push_back(ev.state);
        }
        set_reason(Termination::EventHit);
        return ev;
      }
      g_prev = g_next;
      t_prev = t_next;
    }
    if (trajectory) {
      trajectory->times.push_back(step->t1);
      trajectory->states.push_back(step->y1);
    }
  }
}

SectionResult integrate_to_section(const CoefficientSet& coeffs, const StateVector& x0,
                                   const SectionSpec& section, const IntegratorConfig& cfg,
                                   const StepObserver& observer) {
  Solver solver(coeffs, x0, cfg);
  SectionResult out;
  out.trajectory.times.push_back(0.0);
  out.trajectory.states.push_back(x0);
  Termination reason = Termination::TimeLimit;
  out.event = advance_to_section(solver, section, cfg.max_time, &reason, observer,
                                 cfg.record ? &out.trajectory : nullptr);
  if (!cfg.record) {
    const double t = out.event ? out.event->time : solver.time();
    if (t != 0.0) {
      out.trajectory.times.push_back(t);
      out.trajectory.states.push_back(out.event ? out.event->state : solver.state());
    }
  }
  out.trajectory.reason = reason;
  out.trajectory.accepted_steps = solver.accepted_steps();
  out.trajectory.rejected_steps = solver.rejected_steps();
  return out;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out = "t,x1,x2,x3,x4\n";
  char buf[256];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& x = traj.states[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.times[i], x[0], x[1],
                  x[2], x[3]);
    out += buf;
  }
  return out;
}

}  // namespace hetlab
