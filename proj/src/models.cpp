#include "neverfall/models.hpp"

#include <cmath>

#include "neverfall/quadrature.hpp"
#include "neverfall/spline.hpp"

namespace neverfall {

namespace {

// int_0^x |cos u| du, exactly: 2 per half-period plus the remainder.
double abs_cos_integral(double x) {
  const double k = std::round(x / M_PI);
  return 2.0 * k + std::sin(x - M_PI * k);
}

}  // namespace

double TrainProfile::map_time(double t) const {
  if (t <= declared_end_) return t;
  if (periodic_ && period_ > 0.0) {
    const double t0 = declared_end_ - period_;
    return t0 + std::fmod(t - t0, period_);
  }
  throw TimeOutOfDomain(t);
}

double TrainProfile::position(double t) const { return w_(map_time(t)); }
double TrainProfile::velocity(double t) const { return wd_(map_time(t)); }
double TrainProfile::acceleration(double t) const { return wdd_(map_time(t)); }
double TrainProfile::jerk(double t) const { return wddd_(map_time(t)); }

double TrainProfile::jerk_abs_integral(double t) const {
  if (w3_integral_) return w3_integral_(t);
  if (t <= 0.0) return 0.0;
  if (periodic_ && t > declared_end_) {
    // whole periods plus remainder, all through map_time
    const double per_period =
        adaptive_simpson([this](double s) { return std::abs(jerk(s)); },
                         declared_end_ - period_, declared_end_, 1e-11);
    const double t0 = declared_end_ - period_;
    const double whole = std::floor((t - t0) / period_);
    const double base =
        adaptive_simpson([this](double s) { return std::abs(jerk(s)); }, 0.0, t0, 1e-11);
    const double rest = adaptive_simpson([this](double s) { return std::abs(jerk(s)); }, t0,
                                         t0 + (t - t0) - whole * period_, 1e-11);
    return base + whole * per_period + rest;
  }
  return adaptive_simpson([this](double s) { return std::abs(jerk(s)); }, 0.0, t, 1e-11);
}

TrainProfile::Report TrainProfile::validate(int samples) const {
  Report report;
  const double t_end = std::isfinite(declared_end_) ? declared_end_ : 50.0;
  for (int i = 0; i < samples; ++i) {
    // offset keeps samples away from t = 0 and (for splines) off the knots
    const double t_raw = t_end * (i + 0.617) / samples;
    // balance cancellation against truncation (roundoff grows with |w|), and
    // snap the stencil to multiples of a power-of-two step so t +- h carries
    // no argument rounding
    const double h =
        std::exp2(std::round(std::log2(1e-5 * std::max(1.0, std::sqrt(std::abs(position(t_raw)))))));
    const double t = std::round(t_raw / h) * h;
    if (t - h < 0.0) continue;
    const double acc = acceleration(t);
    const double fd = (position(t + h) - 2.0 * position(t) + position(t - h)) / (h * h);
    report.max_acceleration_rel_err =
        std::max(report.max_acceleration_rel_err,
                 std::abs(fd - acc) / std::max(1.0, std::abs(acc)));
    report.max_sampled_acceleration =
        std::max(report.max_sampled_acceleration, std::abs(acc));
    if (acceleration_bound_ && std::abs(acc) > *acceleration_bound_ + 1e-9)
      report.bound_ok = false;
  }
  report.pass = report.max_acceleration_rel_err < 1e-4 && report.bound_ok;
  return report;
}

TrainProfile TrainProfile::constant_acceleration(double accel) {
  TrainProfile p{Raw{}};
  p.w_ = [accel](double t) { return 0.5 * accel * t * t; };
  p.wd_ = [accel](double t) { return accel * t; };
  p.wdd_ = [accel](double) { return accel; };
  p.wddd_ = [](double) { return 0.0; };
  p.w3_integral_ = [](double) { return 0.0; };
  p.acceleration_bound_ = std::abs(accel);
  return p;
}

TrainProfile TrainProfile::sinusoid(double amplitude, double omega, double phase) {
  TrainProfile p{Raw{}};
  p.w_ = [=](double t) { return amplitude * std::sin(omega * t + phase); };
  p.wd_ = [=](double t) { return amplitude * omega * std::cos(omega * t + phase); };
  p.wdd_ = [=](double t) { return -amplitude * omega * omega * std::sin(omega * t + phase); };
  p.wddd_ = [=](double t) {
    return -amplitude * omega * omega * omega * std::cos(omega * t + phase);
  };
  const double a3 = std::abs(amplitude) * omega * omega;
  p.w3_integral_ = [=](double t) {
    if (t <= 0.0) return 0.0;
    return a3 * (abs_cos_integral(omega * t + phase) - abs_cos_integral(phase));
  };
  p.acceleration_bound_ = std::abs(amplitude) * omega * omega;
  return p;
}

TrainProfile TrainProfile::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  const auto deriv = [](const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
    if (d.empty()) d.push_back(0.0);
    return d;
  };
  const auto horner = [](const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
  };
  const auto c1 = deriv(coeffs), c2 = deriv(c1), c3 = deriv(c2);
  TrainProfile p{Raw{}};
  p.w_ = [coeffs, horner](double t) { return horner(coeffs, t); };
  p.wd_ = [c1, horner](double t) { return horner(c1, t); };
  p.wdd_ = [c2, horner](double t) { return horner(c2, t); };
  p.wddd_ = [c3, horner](double t) { return horner(c3, t); };
  if (coeffs.size() <= 3)  // w'' constant: bounded drive
    p.acceleration_bound_ = coeffs.size() == 3 ? std::abs(2.0 * coeffs[2]) : 0.0;
  return p;
}

TrainProfile profile_from_samples(const std::vector<double>& times,
                                  const std::vector<double>& positions, bool periodic) {
  if (times.size() < 4 || positions.size() != times.size()) throw InsufficientSamples();
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1])) throw NonMonotoneTimes();
  if (!(times.front() <= 0.0))
    throw std::invalid_argument("timetable must start at t <= 0 to cover departure");

  auto spline = std::make_shared<NaturalCubicSpline>(times, positions);
  TrainProfile p{TrainProfile::Raw{}};
  p.w_ = [spline](double t) { return spline->value(t); };
  p.wd_ = [spline](double t) { return spline->derivative(t); };
  p.wdd_ = [spline](double t) { return spline->second_derivative(t); };
  p.wddd_ = [spline](double t) { return spline->third_derivative(t); };
  p.declared_end_ = times.back();
  p.periodic_ = periodic;
  p.period_ = times.back() - times.front();
  if (!periodic)
    p.w3_integral_ = [spline](double t) { return spline->third_abs_integral(t); };
  return p;
}

SecondOrderSystem pendulum_rhs(const TrainProfile& profile) {
  SecondOrderSystem sys;
  sys.dimension = 1;
  sys.rhs = [profile](double t, const Vec& x, const Vec&) {
    Vec a(1);
    a[0] = std::sin(x[0]) - profile.acceleration(t) * std::cos(x[0]);
    return a;
  };
  return sys;
}

SublevelDomain PendulumModel::domain() const { return quadratic_domain(1, level); }

VectorField PendulumModel::initial_field() const {
  const double lam = lambda, c = level;
  return [lam, c](const Vec& x) {
    Vec v(1);
    v[0] = lam * (c - x[0] * x[0]);
    return v;
  };
}

BoundaryGrid PendulumModel::boundary_grid() const {
  const double b = std::sqrt(level);
  Vec lo(1), hi(1);
  lo[0] = -b;
  hi[0] = b;
  return make_boundary_grid(domain(), {lo, hi});
}

std::optional<double> PendulumModel::bounded_drive_margin() const {
  const auto bound = profile.acceleration_bound();
  if (!bound) return std::nullopt;
  const double b = std::sqrt(level);
  return 2.0 * b * (std::sin(b) - *bound * std::abs(std::cos(b)));
}

void EnergyBoundChecker::observe(const TrajectoryState& s) {
  const double wdd = std::abs(profile_.acceleration(s.t));
  if (!started_) {
    started_ = true;
    k0_ = s.xdot[0] * s.xdot[0] + 4.0 + 2.0 * wdd;
  }
  const double slack =
      k0_ + 2.0 * (profile_.jerk_abs_integral(s.t) + wdd) - s.xdot[0] * s.xdot[0];
  if (slack < min_slack_) {
    min_slack_ = slack;
    worst_time_ = s.t;
  }
}

EnergyBoundReport energy_bound_check(const TrainProfile& profile,
                                     const std::vector<TrajectoryState>& trajectory) {
  if (trajectory.empty())
    throw std::invalid_argument("energy_bound_check: empty trajectory");
  EnergyBoundChecker checker(profile);
  for (const TrajectoryState& s : trajectory) checker.observe(s);
  return EnergyBoundReport{checker.min_slack(), checker.worst_time(), checker.ok()};
}

ConeBound cone_bound(double drive_bound, double epsilon) {
  if (drive_bound < 0.0) throw std::invalid_argument("cone_bound: C must be >= 0");
  ConeBound cone;
  cone.drive_bound = drive_bound;
  cone.half_width = std::atan(drive_bound);
  cone.epsilon = epsilon;
  const double shrunk = std::max(cone.half_width - epsilon, 0.0);
  cone.shrunken_level = shrunk * shrunk;
  cone.worst_case_margin =
      2.0 * shrunk * (std::sin(shrunk) - drive_bound * std::cos(shrunk));
  return cone;
}

RotatingRodModel::RotatingRodModel(std::function<double(double)> angle,
                                   std::function<double(double)> angular_rate,
                                   double rate_sq_lower, double half_length)
    : angle_(std::move(angle)),
      angular_rate_(std::move(angular_rate)),
      rate_sq_lower_(rate_sq_lower),
      half_length_(half_length) {
  if (!(rate_sq_lower_ > 0.0))
    throw std::invalid_argument("rod: need phidot^2 >= C > 0");
  if (!(half_length_ * rate_sq_lower_ > 1.0))
    throw std::invalid_argument("rod: sizing r_* C > 1 violated (r_* C = " +
                                std::to_string(half_length_ * rate_sq_lower_) + ")");
}

RotatingRodModel RotatingRodModel::uniform(double omega, double half_length) {
  return RotatingRodModel([omega](double t) { return omega * t; },
                          [omega](double) { return omega; }, omega * omega, half_length);
}

SecondOrderSystem RotatingRodModel::system() const { return rod_rhs(*this); }

SublevelDomain RotatingRodModel::domain() const {
  return quadratic_domain(1, half_length_ * half_length_);
}

BoundaryGrid RotatingRodModel::boundary_grid() const {
  Vec lo(1), hi(1);
  lo[0] = -half_length_;
  hi[0] = half_length_;
  return make_boundary_grid(domain(), {lo, hi});
}

SecondOrderSystem rod_rhs(const RotatingRodModel& model) {
  SecondOrderSystem sys;
  sys.dimension = 1;
  sys.rhs = [model](double t, const Vec& x, const Vec&) {
    const double rate = model.angular_rate(t);
    Vec a(1);
    a[0] = rate * rate * x[0] - std::sin(model.angle(t));
    return a;
  };
  return sys;
}

}  // namespace neverfall
