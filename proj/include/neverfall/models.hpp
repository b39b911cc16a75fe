#ifndef NEVERFALL_MODELS_HPP
#define NEVERFALL_MODELS_HPP

#include <memory>
#include <optional>
#include <vector>

#include "neverfall/domain.hpp"
#include "neverfall/types.hpp"

namespace neverfall {

struct TimeOutOfDomain : std::domain_error {
  explicit TimeOutOfDomain(double t)
      : std::domain_error("train profile queried at t = " + std::to_string(t) +
                          " past its declared domain (no periodic flag)") {}
};

struct InsufficientSamples : std::invalid_argument {
  InsufficientSamples() : std::invalid_argument("timetable needs at least 4 samples") {}
};

struct NonMonotoneTimes : std::invalid_argument {
  NonMonotoneTimes() : std::invalid_argument("timetable times must be strictly increasing") {}
};

/// The train motion w(t) with derivative access up to w''' and the declared
/// a-priori bounds the worst-case checks need. Analytic families have an
/// unbounded declared domain; tabulated profiles either wrap (periodic flag)
/// or refuse queries past their range — train motion is never fabricated.
class TrainProfile {
 public:
  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;   // w''
  double jerk(double t) const;           // w'''
  /// W3(t) >= int_0^t |w'''(s)| ds; exact for the analytic families and for
  /// splines, adaptive quadrature otherwise.
  double jerk_abs_integral(double t) const;

  double declared_end() const { return declared_end_; }
  bool is_periodic() const { return periodic_; }
  double period() const { return period_; }
  /// C with |w''(t)| <= C for all t >= 0, when declared.
  std::optional<double> acceleration_bound() const { return acceleration_bound_; }

  struct Report {
    double max_acceleration_rel_err = 0.0;
    double max_sampled_acceleration = 0.0;
    bool bound_ok = true;
    bool pass = false;
  };
  /// Finite-difference consistency of w'' with w, plus the declared
  /// |w''| bound, sampled across the declared domain.
  Report validate(int samples = 100) const;

  /// Default-constructs as the zero profile (stationary train).
  TrainProfile() { *this = constant_acceleration(0.0); }

  static TrainProfile zero() { return TrainProfile(); }
  static TrainProfile constant_acceleration(double accel);
  /// w(t) = amplitude * sin(omega t + phase)
  static TrainProfile sinusoid(double amplitude, double omega, double phase = 0.0);
  /// w(t) = sum_k coeffs[k] t^k
  static TrainProfile polynomial(std::vector<double> coeffs);

 private:
  friend TrainProfile profile_from_samples(const std::vector<double>&,
                                           const std::vector<double>&, bool);
  struct Raw {};
  explicit TrainProfile(Raw) {}
  double map_time(double t) const;

  std::function<double(double)> w_, wd_, wdd_, wddd_;
  std::function<double(double)> w3_integral_;  // empty: generic quadrature
  double declared_end_ = std::numeric_limits<double>::infinity();
  bool periodic_ = false;
  double period_ = 0.0;
  std::optional<double> acceleration_bound_;
};

/// C2 piecewise-cubic interpolant of a tabulated timetable (natural spline
/// ends); w'' piecewise linear, w''' piecewise constant.
TrainProfile profile_from_samples(const std::vector<double>& times,
                                  const std::vector<double>& positions,
                                  bool periodic = false);

/// The pendulum on the accelerating floor:  phi'' = sin(phi) - w''(t) cos(phi),
/// with F(psi) = psi^2, c = (pi/2)^2 and the one-parameter initial field
/// v(psi) = lambda (c - psi^2).
SecondOrderSystem pendulum_rhs(const TrainProfile& profile);

struct PendulumModel {
  TrainProfile profile;
  double lambda = 0.0;
  double level = (M_PI / 2) * (M_PI / 2);  // c; shrink for cone searches

  SecondOrderSystem system() const { return pendulum_rhs(profile); }
  SublevelDomain domain() const;
  VectorField initial_field() const;
  BoundaryGrid boundary_grid() const;
  /// Worst case over |w''| <= C of the boundary term dF[f] at the domain
  /// endpoints; available when the profile declares the bound.
  std::optional<double> bounded_drive_margin() const;
};

/// Streaming check of the a-priori energy estimate
///   phidot(t)^2 <= K0 + 2 (int_0^t |w'''| + |w''(t)|),
///   K0 = phidot(0)^2 + 4 + 2 |w''(0)|,
/// obtained by multiplying the pendulum equation by phidot and integrating
/// by parts, bounding |sin|, |cos| by 1. The bound is a theorem: a violation
/// convicts the integrator or the profile derivatives, not the model.
class EnergyBoundChecker {
 public:
  explicit EnergyBoundChecker(const TrainProfile& profile) : profile_(profile) {}

  void observe(const TrajectoryState& s);
  bool started() const { return started_; }
  double min_slack() const { return min_slack_; }
  double worst_time() const { return worst_time_; }
  bool ok() const { return min_slack_ >= 0.0; }

 private:
  TrainProfile profile_;
  bool started_ = false;
  double k0_ = 0.0;
  double min_slack_ = std::numeric_limits<double>::infinity();
  double worst_time_ = 0.0;
};

struct EnergyBoundReport {
  double min_slack = 0.0;
  double worst_time = 0.0;
  bool pass = false;
};

EnergyBoundReport energy_bound_check(const TrainProfile& profile,
                                     const std::vector<TrajectoryState>& trajectory);

/// Refined invariant cone available when |w''| <= C: half-width
/// phi0 = arctan(C). The search domain is shrunk to phi0 - epsilon; note the
/// xi = 0 worst-case boundary term 2 psi (sin psi - C cos psi) is zero at
/// phi0 and negative inside, so the shrunken margin is reported as the
/// (nonpositive) value it is rather than claimed positive.
struct ConeBound {
  double drive_bound = 0.0;       // C
  double half_width = 0.0;        // phi0, tan(phi0) = C
  double epsilon = 0.0;
  double shrunken_level = 0.0;    // (phi0 - epsilon)^2, clamped at 0
  double worst_case_margin = 0.0;
};

ConeBound cone_bound(double drive_bound, double epsilon = 1e-3);

/// Ring on a rod rotating in the vertical plane:  r'' = phidot(t)^2 r - sin(phi(t)),
/// F(r) = r^2, c = r_*^2. Construction enforces the sizing r_* C > 1.
class RotatingRodModel {
 public:
  RotatingRodModel(std::function<double(double)> angle,
                   std::function<double(double)> angular_rate, double rate_sq_lower,
                   double half_length);
  /// phi(t) = omega t, so C = omega^2.
  static RotatingRodModel uniform(double omega, double half_length);

  SecondOrderSystem system() const;
  SublevelDomain domain() const;
  BoundaryGrid boundary_grid() const;
  double half_length() const { return half_length_; }
  double rate_sq_lower() const { return rate_sq_lower_; }
  double angle(double t) const { return angle_(t); }
  double angular_rate(double t) const { return angular_rate_(t); }

  /// Initial velocity field; v = 0 satisfies dF[v] >= 0 and is the default.
  VectorField initial_field = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };

 private:
  std::function<double(double)> angle_, angular_rate_;
  double rate_sq_lower_;
  double half_length_;
};

SecondOrderSystem rod_rhs(const RotatingRodModel& model);

}  // namespace neverfall

#endif
