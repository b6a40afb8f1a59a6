#pragma once

// Dormand-Prince 5(4) integration of the vector field with PI step control,
// the free fourth-order interpolant for dense output, and section location.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hetlab/model.hpp"

namespace hetlab {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double initial_step = 1e-3;
  double max_step = 1.0;
  double max_time = 100.0;
  std::uint64_t max_steps = 10'000'000;
  double blowup_norm = 1e6;
  double convergence_field_norm = 1e-13;
  // Accepted steps with |f| below the convergence threshold after which the
  // run counts as stationary regardless of the local spectrum; 0 disables.
  unsigned stationary_steps = 3;
  // When set, integrate with this constant step and no error control.
  std::optional<double> fixed_step;
  // Record every accepted step in the returned Trajectory.
  bool record = true;

  // Throws Error(Config).
  void validate() const;
};

enum class Termination { TimeLimit, StepLimit, EventHit, Blowup, ConvergedToPoint };
std::string_view to_string(Termination t);

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  Termination reason = Termination::TimeLimit;
  std::uint64_t accepted_steps = 0;
  std::uint64_t rejected_steps = 0;

  double final_time() const { return times.back(); }
  const StateVector& final_state() const { return states.back(); }
};

// One accepted step with its dense-output coefficients.
class DenseStep {
 public:
  double t0 = 0.0, t1 = 0.0;
  StateVector y0, y1;

  StateVector at(double t) const;

 private:
  friend class Solver;
  std::array<StateVector, 5> coeff_{};
};

using StepObserver = std::function<void(const DenseStep&)>;

// Stateful adaptive solver. Holds the current state, time and step-size
// controller memory so that successive calls continue one trajectory.
class Solver {
 public:
  Solver(const CoefficientSet& coeffs, const StateVector& x0, IntegratorConfig cfg,
         double t0 = 0.0);

  double time() const { return t_; }
  const StateVector& state() const { return y_; }
  const IntegratorConfig& config() const { return cfg_; }
  std::uint64_t accepted_steps() const { return accepted_; }
  std::uint64_t rejected_steps() const { return rejected_; }

  // Advances one accepted step without passing t_end. Returns the step, or
  // nullopt if a termination condition holds before stepping.
  std::optional<DenseStep> step(double t_end);

  // Termination condition at the current state, if any, other than time.
  std::optional<Termination> terminal_condition() const;

 private:
  const CoefficientSet coeffs_;
  IntegratorConfig cfg_;
  double t_;
  StateVector y_;
  StateVector k1_;  // field at (t_, y_); first-same-as-last
  double h_;
  double err_old_ = 1e-4;
  bool last_rejected_ = false;
  std::uint64_t accepted_ = 0;
  std::uint64_t rejected_ = 0;
  unsigned stationary_run_ = 0;
  bool blowup_ = false;
};

// Integrates from t = 0 to cfg.max_time or an earlier termination.
// Throws Error(Config) or Error(Domain).
Trajectory integrate(const CoefficientSet& coeffs, const StateVector& x0,
                     const IntegratorConfig& cfg, const StepObserver& observer = {});

// ---------------------------------------------------------------------------
// Sections

struct SectionSpec {
  std::string id;
  std::function<double(const StateVector&)> g;
  // +1: crossing with g increasing through 0; -1: decreasing; 0: either.
  int direction = 0;

  static SectionSpec enter_ball(const StateVector& center, double radius);
  static SectionSpec radius_in_plane(double h);
};

struct SectionEvent {
  std::string id;
  double time = 0.0;
  StateVector state;
  int direction = 0;
};

struct SectionResult {
  Trajectory trajectory;
  std::optional<SectionEvent> event;  // empty on timeout or other termination
};

// Event tolerance: |g| <= 1e-10 (1 + |x|) at the reported crossing.
double event_tolerance(const StateVector& x);

SectionResult integrate_to_section(const CoefficientSet& coeffs, const StateVector& x0,
                                   const SectionSpec& section, const IntegratorConfig& cfg,
                                   const StepObserver& observer = {});

// Continues `solver` until the section fires, time reaches t_end, or the run
// terminates. Returns the event, if any; on an event the solver is left at
// the end of the step containing the crossing. When `trajectory` is given,
// accepted steps are appended to it.
std::optional<SectionEvent> advance_to_section(Solver& solver, const SectionSpec& section,
                                               double t_end, Termination* reason,
                                               const StepObserver& observer = {},
                                               Trajectory* trajectory = nullptr);

// CSV with header "t,x1,x2,x3,x4", 17 significant digits per value.
std::string trajectory_to_csv(const Trajectory& traj);

}  // namespace hetlab
