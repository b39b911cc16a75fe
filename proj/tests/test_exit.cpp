#include <doctest.h>

#include <cmath>
#include <random>

#include "neverfall/exit.hpp"
#include "neverfall/models.hpp"
#include "neverfall/quadrature.hpp"

using namespace neverfall;

namespace {

const double kC = (M_PI / 2) * (M_PI / 2);

Vec v1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

PendulumModel undriven(double lambda = 0.0) {
  PendulumModel model;
  model.lambda = lambda;
  return model;
}

// Exit time of the undriven pendulum released at rest from psi, by energy
// conservation: tau = int_psi^{pi/2} dphi / sqrt(2 (cos psi - cos phi)).
// The substitution phi = psi + s^2 removes the inverse-square-root
// singularity at the lower limit. Independent of the ODE integrator.
double quadrature_exit_time(double psi) {
  // cos(psi) - cos(psi + s^2) = 2 sin(psi + s^2/2) sin(s^2/2), which is
  // cancellation-free near s = 0.
  const auto integrand = [psi](double s) {
    if (s == 0.0) return std::sqrt(2.0 / std::sin(psi));  // the s -> 0 limit
    const double h = 0.5 * s * s;
    return s / std::sqrt(std::sin(psi + h) * std::sin(h));
  };
  return adaptive_simpson(integrand, 0.0, std::sqrt(M_PI / 2 - psi), 1e-12);
}

}  // namespace

TEST_CASE("equilibrium start survives with full clearance") {
  const PendulumModel model = undriven();
  const auto outcome =
      exit_time(model.system(), model.domain(), v1(0.0), v1(0.0), 50.0, IntegratorConfig{});
  REQUIRE(std::holds_alternative<SurvivalRecord>(outcome));
  const auto& surv = std::get<SurvivalRecord>(outcome);
  CHECK(surv.horizon == 50.0);
  CHECK(surv.min_clearance == doctest::Approx(kC).epsilon(1e-12));
  CHECK(surv.min_clearance > 0.0);
}

TEST_CASE("undriven exit time matches the energy quadrature") {
  const double frozen = 1.8923199681808227;  // quadrature value, +-2e-14
  CHECK(quadrature_exit_time(0.5) == doctest::Approx(frozen).epsilon(1e-9));

  const PendulumModel model = undriven();
  const auto outcome =
      exit_time(model.system(), model.domain(), v1(0.5), v1(0.0), 50.0, IntegratorConfig{});
  REQUIRE(std::holds_alternative<ExitRecord>(outcome));
  const auto& rec = std::get<ExitRecord>(outcome);
  CHECK(rec.side == ExitSide::Upper);
  CHECK(rec.tau == doctest::Approx(frozen).epsilon(1e-6));
  CHECK(std::abs(model.domain().value(rec.exit_state.x) - kC) <= 1e-9);
  CHECK(rec.bracket_width <= 1e-12);
  CHECK(rec.transversality > 0.0);
  CHECK_FALSE(rec.grazing);
}

TEST_CASE("boundary start exits immediately by convention") {
  const PendulumModel model = undriven();
  for (const double v0 : {0.0, 1.0, -1.0}) {
    const auto outcome = exit_time(model.system(), model.domain(), v1(M_PI / 2), v1(v0), 10.0,
                                   IntegratorConfig{});
    REQUIRE(std::holds_alternative<ExitRecord>(outcome));
    const auto& rec = std::get<ExitRecord>(outcome);
    CHECK(rec.tau == 0.0);
    CHECK(rec.side == ExitSide::Upper);
    CHECK(rec.exit_state.x[0] == M_PI / 2);
  }
}

TEST_CASE("start outside the closed domain is a precondition error") {
  const PendulumModel model = undriven();
  CHECK_THROWS_AS(
      exit_time(model.system(), model.domain(), v1(1.6), v1(0.0), 10.0, IntegratorConfig{}),
      std::invalid_argument);
}

TEST_CASE("retraction point") {
  const PendulumModel model = undriven();
  const VectorField rest = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  SUBCASE("identity on the boundary") {
    const Vec p = retraction_point(model.system(), model.domain(), v1(M_PI / 2), rest, 10.0,
                                   IntegratorConfig{});
    CHECK(p[0] == M_PI / 2);
  }
  SUBCASE("monotone escape lands on the nearest pole") {
    const Vec up = retraction_point(model.system(), model.domain(), v1(0.5), rest, 50.0,
                                    IntegratorConfig{});
    CHECK(std::abs(up[0] - M_PI / 2) < 1e-8);
    const Vec down = retraction_point(model.system(), model.domain(), v1(-0.5), rest, 50.0,
                                      IntegratorConfig{});
    CHECK(std::abs(down[0] + M_PI / 2) < 1e-8);
  }
  SUBCASE("survivors have no retraction point") {
    CHECK_THROWS_AS(retraction_point(model.system(), model.domain(), v1(0.0), rest, 20.0,
                                     IntegratorConfig{}),
                    NoExit);
  }
}

TEST_CASE("linear exit asymptotic") {
  const SublevelDomain pend_dom = quadratic_domain(1, kC);
  SUBCASE("lambda family cancels to 1/(2 psi)") {
    const double psi = 1.5;
    const Vec v0 = v1(1.0 * (kC - psi * psi));
    CHECK(tau_linear_asymptotic(pend_dom, v1(psi), v0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("direct arithmetic") {
    const SublevelDomain dom = quadratic_domain(1, 1.0);
    CHECK(tau_linear_asymptotic(dom, v1(0.99), v1(1.0)) ==
          doctest::Approx((1.0 - 0.9801) / (2.0 * 0.99)).epsilon(1e-12));
  }
  SUBCASE("vanishing directional derivative is not applicable") {
    CHECK_THROWS_AS(tau_linear_asymptotic(pend_dom, v1(1.5), v1(0.0)), NotApplicable);
  }
}

TEST_CASE("quadratic exit asymptotic") {
  SUBCASE("pure quadratic root") {
    CHECK(tau_quadratic_asymptotic({1.0, 0.0, -1e-4}) == doctest::Approx(0.01).epsilon(1e-12));
  }
  SUBCASE("on the boundary with outward field") {
    CHECK(tau_quadratic_asymptotic({1.0, 1.0, 0.0}) == 0.0);
  }
  SUBCASE("degenerate quadratic coefficient") {
    CHECK_THROWS_AS(tau_quadratic_asymptotic({0.0, 1.0, -0.1}), DegenerateCase);
  }
  SUBCASE("pendulum rest release near the pole") {
    const PendulumModel model = undriven();
    const double psi = 1.55;
    const auto q = exit_coefficients(model.domain(), model.system(), v1(psi), v1(0.0));
    CHECK(q.A == doctest::Approx(psi * std::sin(psi)).epsilon(1e-12));
    CHECK(q.B == 0.0);
    CHECK(q.C == doctest::Approx(psi * psi - kC).epsilon(1e-12));
    const double u = tau_quadratic_asymptotic(q);
    CHECK(u == doctest::Approx(0.20464782849925756).epsilon(1e-10));
    const auto outcome = exit_time(model.system(), model.domain(), v1(psi), v1(0.0), 10.0,
                                   IntegratorConfig{});
    const double tau = std::get<ExitRecord>(outcome).tau;
    CHECK(std::abs(u - tau) / tau < 0.01);  // leading order, measured 0.34%
  }
}

TEST_CASE("quadratic root reduces to the linear formula for dominant B") {
  std::mt19937_64 rng(11);
  const auto uniform = [&rng](double a, double b) {
    return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (int i = 0; i < 200; ++i) {
    const double a = uniform(0.1, 10.0);
    const double c = -uniform(1e-6, 1.0);
    const double b = std::sqrt(100.0 * 4.0 * a * std::abs(c)) * uniform(1.0, 10.0);
    const double u = tau_quadratic_asymptotic({a, b, c});
    CHECK(std::abs(u - (-c / b)) <= 2.0 * std::abs(a * c * c / (b * b * b)));
  }
}

TEST_CASE("asymptotics validation tables") {
  const std::vector<double> distances = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  IntegratorConfig cfg;
  SUBCASE("lambda = 1: the field vanishes on the boundary, quadratic branch") {
    const PendulumModel model = undriven(1.0);
    const auto table = validate_tau_asymptotics(model.system(), model.domain(),
                                                model.initial_field(), v1(M_PI / 2),
                                                distances, cfg);
    CHECK_FALSE(table.linear_branch);
    CHECK(table.pass);
    CHECK(table.rows.back().rel_error < 0.05);
  }
  SUBCASE("lambda = 0: quadratic branch") {
    const PendulumModel model = undriven(0.0);
    const auto table = validate_tau_asymptotics(model.system(), model.domain(),
                                                model.initial_field(), v1(M_PI / 2),
                                                distances, cfg);
    CHECK_FALSE(table.linear_branch);
    CHECK(table.pass);
  }
  SUBCASE("outward unit field: genuine linear branch") {
    const PendulumModel model = undriven();
    const VectorField ones = [](const Vec& x) { return Vec(Vec::Ones(x.size())); };
    const auto table = validate_tau_asymptotics(model.system(), model.domain(), ones,
                                                v1(M_PI / 2), distances, cfg);
    CHECK(table.linear_branch);
    CHECK(table.pass);
  }
  SUBCASE("zero distance matches the boundary convention exactly") {
    const PendulumModel model = undriven(0.0);
    const auto table = validate_tau_asymptotics(model.system(), model.domain(),
                                                model.initial_field(), v1(M_PI / 2),
                                                {1e-2, 1e-3, 0.0}, cfg);
    CHECK(table.rows.back().tau_numeric == 0.0);
    CHECK(table.rows.back().tau_predicted == 0.0);
    CHECK(table.rows.back().rel_error == 0.0);
  }
}

TEST_CASE("transversality is positive for driven-pendulum exits") {
  PendulumModel model;
  model.profile = TrainProfile::sinusoid(0.2, 1.0);
  const SecondOrderSystem sys = model.system();
  const SublevelDomain dom = model.domain();
  std::mt19937_64 rng(3);
  int exits = 0;
  for (int i = 0; i < 12; ++i) {
    const double y =
        (0.3 + 1.1 * static_cast<double>(rng() >> 11) * 0x1.0p-53) * (i % 2 ? 1.0 : -1.0);
    const auto outcome = exit_time(sys, dom, v1(y), v1(0.0), 40.0, IntegratorConfig{});
    if (const auto* rec = std::get_if<ExitRecord>(&outcome)) {
      ++exits;
      CHECK(rec->transversality > 0.0);
      CHECK_FALSE(rec->transversality_anomaly);
    }
  }
  CHECK(exits >= 10);
}

TEST_CASE("exit time is stable under small perturbations of the start") {
  PendulumModel model;
  model.profile = TrainProfile::sinusoid(0.2, 1.0);
  const SecondOrderSystem sys = model.system();
  const SublevelDomain dom = model.domain();
  const auto tau_of = [&](double y) {
    return std::get<ExitRecord>(exit_time(sys, dom, v1(y), v1(0.0), 40.0, IntegratorConfig{}))
        .tau;
  };
  const double base = tau_of(0.8);
  CHECK(std::abs(tau_of(0.8 + 1e-6) - base) < 1e-3);
  CHECK(std::abs(tau_of(0.8 - 1e-6) - base) < 1e-3);
}

TEST_CASE("observer sees every predicate sample, starting at t = 0") {
  const PendulumModel model = undriven();
  std::vector<TrajectoryState> seen;
  const auto outcome =
      exit_time(model.system(), model.domain(), v1(0.5), v1(0.0), 50.0, IntegratorConfig{},
                [&seen](const TrajectoryState& s) { seen.push_back(s); });
  REQUIRE(std::holds_alternative<ExitRecord>(outcome));
  REQUIRE_FALSE(seen.empty());
  CHECK(seen.front().t == 0.0);
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i].t >= seen[i - 1].t);
}
