#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "neverfall/quadrature.hpp"
#include "neverfall/spline.hpp"

using namespace neverfall;

namespace {

NaturalCubicSpline wiggly() {
  std::vector<double> t, w;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(0.3 * i);
    w.push_back(std::sin(1.7 * 0.3 * i) + 0.1 * i);
  }
  return NaturalCubicSpline(t, w);
}

}  // namespace

TEST_CASE("spline interpolates the knots exactly") {
  const NaturalCubicSpline s = wiggly();
  for (int i = 0; i <= 20; ++i)
    CHECK(s.value(0.3 * i) ==
          doctest::Approx(std::sin(1.7 * 0.3 * i) + 0.1 * i).epsilon(1e-13));
}

TEST_CASE("spline is C2 across the knots") {
  // one-sided values an h apart may differ by ~ 2h * next-derivative;
  // anything beyond that would be a jump
  const NaturalCubicSpline s = wiggly();
  const double h = 1e-9;
  for (int i = 1; i < 20; ++i) {
    const double t = 0.3 * i;
    CHECK(std::abs(s.value(t + h) - s.value(t - h)) < 1e-7);
    CHECK(std::abs(s.derivative(t + h) - s.derivative(t - h)) < 1e-7);
    CHECK(std::abs(s.second_derivative(t + h) - s.second_derivative(t - h)) < 1e-6);
  }
}

TEST_CASE("natural boundary conditions") {
  const NaturalCubicSpline s = wiggly();
  CHECK(std::abs(s.second_derivative(s.t_begin())) < 1e-12);
  CHECK(std::abs(s.second_derivative(s.t_end())) < 1e-12);
}

TEST_CASE("derivatives are consistent with finite differences") {
  const NaturalCubicSpline s = wiggly();
  const double h = 1e-6;
  for (const double t : {0.47, 1.93, 3.08, 5.51}) {
    const double fd1 = (s.value(t + h) - s.value(t - h)) / (2 * h);
    CHECK(s.derivative(t) == doctest::Approx(fd1).epsilon(1e-7));
    const double fd2 = (s.derivative(t + h) - s.derivative(t - h)) / (2 * h);
    CHECK(s.second_derivative(t) == doctest::Approx(fd2).epsilon(1e-6));
    const double fd3 = (s.second_derivative(t + h) - s.second_derivative(t - h)) / (2 * h);
    CHECK(s.third_derivative(t) == doctest::Approx(fd3).epsilon(1e-5));
  }
}

TEST_CASE("cumulative |w'''| matches quadrature") {
  const NaturalCubicSpline s = wiggly();
  for (const double t : {0.9, 2.5, 6.0}) {
    const double numeric =
        adaptive_simpson([&s](double u) { return std::abs(s.third_derivative(u)); },
                         s.t_begin(), t, 1e-12);
    CHECK(s.third_abs_integral(t) == doctest::Approx(numeric).epsilon(1e-9));
  }
}

TEST_CASE("spline input validation") {
  CHECK_THROWS_AS(NaturalCubicSpline({0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(NaturalCubicSpline({0.0, 0.0, 1.0}, {1.0, 2.0, 3.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(NaturalCubicSpline({0.0, 1.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
}
