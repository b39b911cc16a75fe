#ifndef NEVERFALL_INTEGRATE_HPP
#define NEVERFALL_INTEGRATE_HPP

#include <optional>
#include <string>

#include "neverfall/types.hpp"

namespace neverfall {

/// Raised when the right-hand side returns NaN or infinity.
struct NonFiniteRhs : std::runtime_error {
  double t;
  explicit NonFiniteRhs(double t_)
      : std::runtime_error("rhs returned a non-finite value at t = " + std::to_string(t_)),
        t(t_) {}
};

/// Raised when error control drives the step below the configured minimum,
/// the usual signature of stiffness or finite-time blowup.
struct StepUnderflow : std::runtime_error {
  double t;
  double step;
  StepUnderflow(double t_, double h)
      : std::runtime_error("step size underflow at t = " + std::to_string(t_) +
                           " (required h = " + std::to_string(h) + ")"),
        t(t_), step(h) {}
};

/// A breakdown that happened while the stop predicate was still strictly
/// negative, i.e. strictly inside the monitored sublevel set. Kept distinct
/// because the existence theorem's hypotheses rule this out for qualifying
/// systems, so its appearance is a diagnostic, not a routine failure.
struct IntegrationBreakdown : std::runtime_error {
  double t;
  IntegrationBreakdown(double t_, const std::string& cause)
      : std::runtime_error("integration broke down strictly inside the domain at t = " +
                           std::to_string(t_) + ": " + cause),
        t(t_) {}
};

/// One accepted step's continuous extension over [t0, t1]. Coefficients are
/// for the packed state (x, xdot), so both position and velocity interpolate
/// without differentiating. Endpoint values match the accepted states to
/// within 10x the absolute tolerance.
class DenseSegment {
 public:
  DenseSegment() = default;
  DenseSegment(double t0, double t1, Vec c0, Vec c1, Vec c2, Vec c3, Vec c4)
      : t0_(t0), t1_(t1),
        c0_(std::move(c0)), c1_(std::move(c1)), c2_(std::move(c2)),
        c3_(std::move(c3)), c4_(std::move(c4)) {}

  double t_begin() const { return t0_; }
  double t_end() const { return t1_; }
  int dimension() const { return static_cast<int>(c0_.size()) / 2; }

  /// Interpolated position/velocity for t in [t0, t1].
  Vec position_at(double t) const;
  Vec velocity_at(double t) const;
  TrajectoryState state_at(double t) const;

 private:
  Vec packed_at(double t) const;

  double t0_ = 0.0, t1_ = 0.0;
  Vec c0_, c1_, c2_, c3_, c4_;
};

struct StepResult {
  TrajectoryState state;     // at t + h for the accepted step h
  DenseSegment segment;      // covers [t, t + h]
  double step_used = 0.0;
  double next_step_hint = 0.0;
};

/// One adaptive Dormand-Prince 5(4) step from `state`. The local error
/// estimate of the accepted step is below tolerance; `step_hint` (0 = use
/// cfg.initial_step) seeds the controller.
StepResult step_adaptive(const SecondOrderSystem& system, const TrajectoryState& state,
                         const IntegratorConfig& cfg, double step_hint = 0.0);

/// Continuous scalar observable of the trajectory; a sign change stops
/// integrate_until.
using StopPredicate = std::function<double(const TrajectoryState&)>;

/// Sign-change bracket: the accepted step's dense segment plus the sample
/// subinterval [t_lo, t_hi] on which the predicate changed sign.
struct EventBracket {
  DenseSegment segment;
  double t_lo = 0.0, t_hi = 0.0;
  double value_lo = 0.0, value_hi = 0.0;
};

struct IntegrationResult {
  TrajectoryState final_state;
  std::optional<EventBracket> event;
};

/// Integrates until t_end or until `stop` changes sign across an accepted
/// step. The predicate is evaluated at every accepted step endpoint and at
/// cfg.interior_samples dense samples per step; narrower crossings can be
/// missed only if they also re-cross. Pass an empty predicate to integrate
/// to t_end unconditionally.
IntegrationResult integrate_until(const SecondOrderSystem& system, const TrajectoryState& start,
                                  double t_end, const StopPredicate& stop,
                                  const IntegratorConfig& cfg);

}  // namespace neverfall

#endif
