// Dormand-Prince 5(4) with the classic quartic continuous extension
// (Hairer, Norsett, Wanner, "Solving ODEs I", DOPRI5). Second-order systems
// are integrated as the packed first-order system y = (x, xdot).

#include "neverfall/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace neverfall {

namespace {

// Butcher tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// b - bhat, the embedded 4th-order error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kShrinkLimit = 0.2;
constexpr double kGrowLimit = 5.0;

Vec pack(const TrajectoryState& s) {
  Vec y(2 * s.x.size());
  y << s.x, s.xdot;
  return y;
}

TrajectoryState unpack(double t, const Vec& y) {
  const auto m = y.size() / 2;
  return TrajectoryState{t, y.head(m), y.tail(m)};
}

// Stateful stepper so integrate_until can reuse the FSAL stage and the
// controller's step hint across steps.
class Dopri5 {
 public:
  Dopri5(const SecondOrderSystem& system, const TrajectoryState& start,
         const IntegratorConfig& cfg, double step_hint)
      : sys_(system), cfg_(cfg), t_(start.t), y_(pack(start)) {
    cfg_.validate();
    if (!start.finite()) throw std::invalid_argument("integrate: start state is not finite");
    if (start.x.size() != sys_.dimension || start.xdot.size() != sys_.dimension)
      throw std::invalid_argument("integrate: state dimension does not match the system");
    f_ = eval(t_, y_);
    h_ = step_hint > 0.0 ? step_hint : cfg_.initial_step;
    h_ = std::clamp(h_, cfg_.min_step, cfg_.max_step);
  }

  double t() const { return t_; }
  double step_hint() const { return h_; }
  TrajectoryState state() const { return unpack(t_, y_); }

  /// Advances by one accepted step of size at most h_cap and returns its
  /// dense segment. Throws StepUnderflow / NonFiniteRhs.
  DenseSegment advance(double h_cap) {
    double h = std::min(h_, h_cap);
    for (;;) {
      if (h < cfg_.min_step) throw StepUnderflow(t_, h);

      const Vec k1 = f_;
      const Vec k2 = eval(t_ + c2 * h, y_ + h * (a21 * k1));
      const Vec k3 = eval(t_ + c3 * h, y_ + h * (a31 * k1 + a32 * k2));
      const Vec k4 = eval(t_ + c4 * h, y_ + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec k5 = eval(t_ + c5 * h, y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec k6 =
          eval(t_ + h, y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec y1 = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec k7 = eval(t_ + h, y1);  // FSAL

      const Vec err_vec =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double err = 0.0;
      for (Eigen::Index i = 0; i < y_.size(); ++i) {
        const double sc =
            cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
        const double r = err_vec[i] / sc;
        err += r * r;
      }
      err = std::sqrt(err / static_cast<double>(y_.size()));

      const double factor =
          err == 0.0 ? kGrowLimit
                     : std::clamp(kSafety * std::pow(err, -0.2), kShrinkLimit, kGrowLimit);
      if (err <= 1.0) {
        const Vec dy = y1 - y_;
        Vec c2v = dy;
        Vec c3v = h * k1 - dy;
        Vec c4v = dy - h * k7 - c3v;
        Vec c5v = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        DenseSegment seg(t_, t_ + h, y_, std::move(c2v), std::move(c3v), std::move(c4v),
                         std::move(c5v));
        t_ += h;
        y_ = y1;
        f_ = k7;
        h_ = std::clamp(h * factor, cfg_.min_step, cfg_.max_step);
        return seg;
      }
      h *= std::min(factor, 1.0);
    }
  }

 private:
  Vec eval(double t, const Vec& y) const {
    const auto m = y.size() / 2;
    const Vec accel = sys_.rhs(t, y.head(m), y.tail(m));
    if (accel.size() != m) throw std::invalid_argument("rhs returned wrong dimension");
    if (!accel.allFinite()) throw NonFiniteRhs(t);
    Vec dy(y.size());
    dy << y.tail(m), accel;
    return dy;
  }

  SecondOrderSystem sys_;
  IntegratorConfig cfg_;
  double t_;
  Vec y_;
  Vec f_;
  double h_ = 0.0;
};

}  // namespace

Vec DenseSegment::packed_at(double t) const {
  const double h = t1_ - t0_;
  const double theta = h > 0.0 ? (t - t0_) / h : 0.0;
  const double theta1 = 1.0 - theta;
  return c0_ + theta * (c1_ + theta1 * (c2_ + theta * (c3_ + theta1 * c4_)));
}

Vec DenseSegment::position_at(double t) const { return packed_at(t).head(dimension()); }

Vec DenseSegment::velocity_at(double t) const { return packed_at(t).tail(dimension()); }

TrajectoryState DenseSegment::state_at(double t) const {
  const Vec y = packed_at(t);
  return TrajectoryState{t, y.head(dimension()), y.tail(dimension())};
}

StepResult step_adaptive(const SecondOrderSystem& system, const TrajectoryState& state,
                         const IntegratorConfig& cfg, double step_hint) {
  Dopri5 stepper(system, state, cfg, step_hint);
  DenseSegment seg = stepper.advance(cfg.max_step);
  return StepResult{stepper.state(), std::move(seg), stepper.t() - state.t,
                    stepper.step_hint()};
}

IntegrationResult integrate_until(const SecondOrderSystem& system, const TrajectoryState& start,
                                  double t_end, const StopPredicate& stop,
                                  const IntegratorConfig& cfg) {
  if (!(start.t < t_end))
    throw std::invalid_argument("integrate_until: need start.t < t_end");

  Dopri5 stepper(system, start, cfg, 0.0);
  double g_prev = 0.0;
  if (stop) {
    g_prev = stop(start);
    if (g_prev == 0.0)  // already on the event set
      return IntegrationResult{start, EventBracket{DenseSegment(), start.t, start.t, 0.0, 0.0}};
  }

  while (stepper.t() < t_end) {
    const double remaining = t_end - stepper.t();
    if (remaining <= cfg.min_step) break;  // done to within the time resolution

    DenseSegment seg;
    try {
      seg = stepper.advance(remaining);
    } catch (const StepUnderflow& e) {
      if (stop && g_prev < 0.0) throw IntegrationBreakdown(e.t, e.what());
      throw;
    } catch (const NonFiniteRhs& e) {
      if (stop && g_prev < 0.0) throw IntegrationBreakdown(e.t, e.what());
      throw;
    }

    if (stop) {
      const int n = cfg.interior_samples;
      const double ta = seg.t_begin(), tb = seg.t_end();
      double s_prev = ta;
      for (int j = 1; j <= n + 1; ++j) {
        const double s = (j == n + 1) ? tb : ta + (tb - ta) * j / (n + 1);
        const double g = stop(j == n + 1 ? stepper.state() : seg.state_at(s));
        if (g == 0.0 || g_prev * g < 0.0)
          return IntegrationResult{stepper.state(),
                                   EventBracket{seg, s_prev, s, g_prev, g}};
        g_prev = g;
        s_prev = s;
      }
    }
  }
  return IntegrationResult{stepper.state(), std::nullopt};
}

}  // namespace neverfall
