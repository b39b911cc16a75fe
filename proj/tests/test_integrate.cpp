#include <doctest.h>

#include <cmath>
#include <random>

#include "neverfall/integrate.hpp"

using namespace neverfall;

namespace {

SecondOrderSystem free_motion() {
  return {1, [](double, const Vec&, const Vec&) { return Vec(Vec::Zero(1)); }};
}

SecondOrderSystem harmonic() {
  return {1, [](double, const Vec& x, const Vec&) { return Vec(-x); }};
}

TrajectoryState state1(double t, double x, double v) {
  Vec xv(1), vv(1);
  xv[0] = x;
  vv[0] = v;
  return {t, xv, vv};
}

// Fixed-step RK4 on the packed system, the independent reference for the
// dense-output consistency check.
TrajectoryState rk4_to(const SecondOrderSystem& sys, TrajectoryState s, double t_end,
                       double dt) {
  while (s.t < t_end) {
    const double h = std::min(dt, t_end - s.t);
    Vec y(2);
    y << s.x[0], s.xdot[0];
    const auto eval = [&](double t, const Vec& yy) {
      Vec xx(1), vv(1);
      xx[0] = yy[0];
      vv[0] = yy[1];
      Vec out(2);
      out[0] = yy[1];
      out[1] = sys.rhs(t, xx, vv)[0];
      return out;
    };
    const Vec k1 = eval(s.t, y);
    const Vec k2 = eval(s.t + h / 2, y + h / 2 * k1);
    const Vec k3 = eval(s.t + h / 2, y + h / 2 * k2);
    const Vec k4 = eval(s.t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    s.t += h;
    s.x[0] = y[0];
    s.xdot[0] = y[1];
  }
  return s;
}

}  // namespace

TEST_CASE("free motion advances linearly to roundoff") {
  const auto res = step_adaptive(free_motion(), state1(0, 1.0, 2.0), IntegratorConfig{});
  const double h = res.step_used;
  CHECK(h > 0.0);
  CHECK(res.state.x[0] == doctest::Approx(1.0 + 2.0 * h).epsilon(1e-14));
  CHECK(res.state.xdot[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("dense segment tracks cos(t) at midpoints") {
  IntegratorConfig cfg;
  TrajectoryState s = state1(0, 1.0, 0.0);
  const SecondOrderSystem sys = harmonic();
  double hint = 0.0;
  while (s.t < 1.5) {
    const auto res = step_adaptive(sys, s, cfg, hint);
    const double mid = 0.5 * (s.t + res.state.t);
    CHECK(res.segment.position_at(mid)[0] == doctest::Approx(std::cos(mid)).epsilon(1e-8));
    CHECK(res.segment.velocity_at(mid)[0] == doctest::Approx(-std::sin(mid)).epsilon(1e-8));
    s = res.state;
    hint = res.next_step_hint;
  }
}

TEST_CASE("dense segment endpoints match the accepted states") {
  IntegratorConfig cfg;
  const TrajectoryState s = state1(0, 0.3, -0.7);
  const auto res = step_adaptive(harmonic(), s, cfg);
  CHECK(std::abs(res.segment.position_at(0.0)[0] - s.x[0]) <= 10 * cfg.abs_tol);
  CHECK(std::abs(res.segment.velocity_at(0.0)[0] - s.xdot[0]) <= 10 * cfg.abs_tol);
  const double t1 = res.state.t;
  CHECK(std::abs(res.segment.position_at(t1)[0] - res.state.x[0]) <= 10 * cfg.abs_tol);
  CHECK(std::abs(res.segment.velocity_at(t1)[0] - res.state.xdot[0]) <= 10 * cfg.abs_tol);
}

TEST_CASE("non-finite rhs is reported") {
  SecondOrderSystem bad{1, [](double, const Vec&, const Vec&) {
                          Vec a(1);
                          a[0] = std::numeric_limits<double>::infinity();
                          return a;
                        }};
  CHECK_THROWS_AS(step_adaptive(bad, state1(0, 0, 0), IntegratorConfig{}), NonFiniteRhs);
}

TEST_CASE("harmonic oscillator returns home after one period") {
  const auto res =
      integrate_until(harmonic(), state1(0, 1.0, 0.0), 2 * M_PI, {}, IntegratorConfig{});
  CHECK_FALSE(res.event.has_value());
  CHECK(res.final_state.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(res.final_state.xdot[0]) < 1e-8);
}

TEST_CASE("linear crossing is bracketed") {
  const StopPredicate pred = [](const TrajectoryState& s) { return s.x[0] - 0.5; };
  const auto res =
      integrate_until(free_motion(), state1(0, 0.0, 1.0), 2.0, pred, IntegratorConfig{});
  REQUIRE(res.event.has_value());
  CHECK(res.event->t_lo <= 0.5);
  CHECK(res.event->t_hi >= 0.5);
  CHECK(res.event->value_lo < 0.0);
  CHECK(res.event->value_hi >= 0.0);
}

TEST_CASE("pendulum equilibrium stays put") {
  SecondOrderSystem pend{1, [](double, const Vec& x, const Vec&) {
                           Vec a(1);
                           a[0] = std::sin(x[0]);
                           return a;
                         }};
  const auto res = integrate_until(pend, state1(0, 0.0, 0.0), 40.0, {}, IntegratorConfig{});
  CHECK(res.final_state.x[0] == 0.0);
  CHECK(res.final_state.xdot[0] == 0.0);
}

TEST_CASE("tightening tolerances reduces the endpoint error") {
  double prev_err = -1.0;
  for (const double scale : {1.0, 1e-2, 1e-4}) {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-6 * scale;
    cfg.abs_tol = 1e-8 * scale;
    const auto res = integrate_until(harmonic(), state1(0, 1.0, 0.0), 2 * M_PI, {}, cfg);
    const double err = std::abs(res.final_state.x[0] - 1.0);
    if (prev_err >= 0.0) CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-8);  // the tolerance-1e-10 path
}

TEST_CASE("dense output agrees with a fixed-step reference") {
  IntegratorConfig cfg;
  const SecondOrderSystem sys = harmonic();
  std::mt19937_64 rng(7);
  std::vector<double> queries;
  for (int i = 0; i < 100; ++i)
    queries.push_back(2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53);
  std::sort(queries.begin(), queries.end());

  TrajectoryState s = state1(0, 1.0, 0.0);
  TrajectoryState ref = state1(0, 1.0, 0.0);
  std::size_t qi = 0;
  double hint = 0.0;
  while (qi < queries.size()) {
    const auto res = step_adaptive(sys, s, cfg, hint);
    while (qi < queries.size() && queries[qi] <= res.state.t) {
      const double t = queries[qi++];
      ref = rk4_to(sys, ref, t, 1e-6);
      CHECK(std::abs(res.segment.position_at(t)[0] - ref.x[0]) < 1e-7);
    }
    s = res.state;
    hint = res.next_step_hint;
  }
}

TEST_CASE("velocity-flip reversibility on the harmonic oscillator") {
  IntegratorConfig cfg;
  const SecondOrderSystem sys = harmonic();
  auto out = integrate_until(sys, state1(0, 0.8, 0.25), 2 * M_PI, {}, cfg).final_state;
  out.xdot = -out.xdot;
  out.t = 0.0;
  auto back = integrate_until(sys, out, 2 * M_PI, {}, cfg).final_state;
  CHECK(back.x[0] == doctest::Approx(0.8).epsilon(1e-7));
  CHECK(-back.xdot[0] == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("finite-time blowup underflows the step") {
  SecondOrderSystem cubic{1, [](double, const Vec& x, const Vec&) {
                            Vec a(1);
                            a[0] = x[0] * x[0] * x[0];
                            return a;
                          }};
  CHECK_THROWS_AS(integrate_until(cubic, state1(0, 2.0, 2.0), 10.0, {}, IntegratorConfig{}),
                  StepUnderflow);
}

TEST_CASE("breakdown strictly inside the domain is a distinct diagnostic") {
  SecondOrderSystem cubic{1, [](double, const Vec& x, const Vec&) {
                            Vec a(1);
                            a[0] = x[0] * x[0] * x[0];
                            return a;
                          }};
  const StopPredicate inside = [](const TrajectoryState&) { return -1.0; };
  CHECK_THROWS_AS(
      integrate_until(cubic, state1(0, 2.0, 2.0), 10.0, inside, IntegratorConfig{}),
      IntegrationBreakdown);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(integrate_until(harmonic(), state1(1.0, 0, 0), 0.5, {}, IntegratorConfig{}),
                  std::invalid_argument);
  IntegratorConfig bad;
  bad.min_step = 1.0;
  CHECK_THROWS_AS(step_adaptive(harmonic(), state1(0, 1, 0), bad), std::invalid_argument);
  TrajectoryState nan_state = state1(0, std::nan(""), 0);
  CHECK_THROWS_AS(step_adaptive(harmonic(), nan_state, IntegratorConfig{}),
                  std::invalid_argument);
}
