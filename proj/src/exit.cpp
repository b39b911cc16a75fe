#include "neverfall/exit.hpp"

#include <algorithm>
#include <cmath>

namespace neverfall {

namespace {

constexpr double kEventTimeTol = 1e-12;

std::optional<ExitSide> side_of(const SublevelDomain& dom, const Vec& x) {
  if (dom.dimension != 1) return std::nullopt;
  return x[0] < 0.0 ? ExitSide::Lower : ExitSide::Upper;
}

ExitRecord boundary_exit_record(const SublevelDomain& dom, const Vec& y, const Vec& v0) {
  ExitRecord rec;
  rec.tau = 0.0;
  rec.exit_state = TrajectoryState{0.0, y, v0};
  rec.transversality = dom.gradient(y).dot(v0);
  rec.side = side_of(dom, y);
  rec.bracket_width = 0.0;
  rec.grazing = std::abs(rec.transversality) < kGrazingTol;
  rec.transversality_anomaly = false;  // Lemma 1 speaks about interior starts
  return rec;
}

}  // namespace

ExitOutcome exit_time(const SecondOrderSystem& system, const SublevelDomain& dom, const Vec& y,
                      const Vec& v0, double horizon, const IntegratorConfig& cfg,
                      const TrajectoryObserver& observer) {
  if (!(horizon > 0.0)) throw std::invalid_argument("exit_time: horizon must be positive");
  const double g0 = dom.value(y) - dom.level;
  if (g0 > dom.boundary_tol)
    throw std::invalid_argument("exit_time: initial point lies outside the closed domain");

  if (std::abs(g0) <= dom.boundary_tol)  // on the boundary: tau = 0 by convention
    return boundary_exit_record(dom, y, v0);

  double min_clearance = std::numeric_limits<double>::infinity();
  const StopPredicate predicate = [&](const TrajectoryState& s) {
    if (observer) observer(s);
    const double g = dom.value(s.x) - dom.level;
    min_clearance = std::min(min_clearance, -g);
    return g;
  };

  const TrajectoryState start{0.0, y, v0};
  const IntegrationResult res = integrate_until(system, start, horizon, predicate, cfg);

  if (!res.event)
    return SurvivalRecord{horizon, res.final_state, min_clearance};

  // Refine the crossing on the dense interpolant by bisection to the
  // configured absolute time tolerance.
  const EventBracket& ev = *res.event;
  double t_lo = ev.t_lo, t_hi = ev.t_hi;
  double g_lo = ev.value_lo;
  while (t_hi - t_lo > kEventTimeTol) {
    const double mid = 0.5 * (t_lo + t_hi);
    const double g_mid = dom.value(ev.segment.position_at(mid)) - dom.level;
    if (g_mid == 0.0) {
      t_lo = t_hi = mid;
      break;
    }
    if ((g_lo < 0.0) == (g_mid < 0.0)) {
      t_lo = mid;
      g_lo = g_mid;
    } else {
      t_hi = mid;
    }
  }

  ExitRecord rec;
  rec.tau = t_hi;
  rec.exit_state = ev.segment.state_at(t_hi);
  rec.transversality = dom.gradient(rec.exit_state.x).dot(rec.exit_state.xdot);
  rec.side = side_of(dom, rec.exit_state.x);
  rec.bracket_width = t_hi - t_lo;
  rec.grazing = std::abs(rec.transversality) < kGrazingTol;
  rec.transversality_anomaly = rec.transversality <= 0.0;
  return rec;
}

Vec retraction_point(const SecondOrderSystem& system, const SublevelDomain& dom, const Vec& y,
                     const VectorField& v, double horizon, const IntegratorConfig& cfg) {
  if (membership(dom, y) == Membership::Boundary) return y;
  const ExitOutcome outcome = exit_time(system, dom, y, v(y), horizon, cfg);
  if (const auto* rec = std::get_if<ExitRecord>(&outcome)) return rec->exit_state.x;
  throw NoExit();
}

double tau_linear_asymptotic(const SublevelDomain& dom, const Vec& y, const Vec& v0) {
  const double denom = dom.gradient(y).dot(v0);
  if (denom <= 1e-12) throw NotApplicable();
  return (dom.level - dom.value(y)) / denom;
}

QuadraticExitCoefficients exit_coefficients(const SublevelDomain& dom,
                                            const SecondOrderSystem& system, const Vec& y,
                                            const Vec& v0) {
  const Vec grad = dom.gradient(y);
  const Vec accel = system.rhs(0.0, y, v0);
  QuadraticExitCoefficients q;
  q.A = 0.5 * (grad.dot(accel) + v0.dot(dom.hessian(y) * v0));
  q.B = grad.dot(v0);
  q.C = dom.value(y) - dom.level;
  return q;
}

double tau_quadratic_asymptotic(const QuadraticExitCoefficients& q) {
  if (q.A <= 1e-12) throw DegenerateCase();
  if (q.C > 0.0)
    throw std::invalid_argument("tau_quadratic_asymptotic: C must be <= 0 (y inside D_c)");
  const double disc = q.B * q.B - 4.0 * q.A * q.C;  // >= B^2 since A > 0, C <= 0
  const double root = std::sqrt(disc);
  if (q.B >= 0.0)
    return q.C == 0.0 ? 0.0 : -2.0 * q.C / (q.B + root);
  return (root - q.B) / (2.0 * q.A);
}

AsymptoticsTable validate_tau_asymptotics(const SecondOrderSystem& system,
                                          const SublevelDomain& dom, const VectorField& v,
                                          const Vec& y_tilde,
                                          const std::vector<double>& distances,
                                          const IntegratorConfig& cfg) {
  if (membership(dom, y_tilde) != Membership::Boundary)
    throw std::invalid_argument("validate_tau_asymptotics: y_tilde must lie on the boundary");

  const Vec grad_tilde = dom.gradient(y_tilde);
  if (grad_tilde.norm() <= 1e-12) throw DegenerateGradient();
  const Vec inward = -grad_tilde.normalized();

  AsymptoticsTable table;
  table.linear_branch = grad_tilde.dot(v(y_tilde)) > 1e-8;

  for (const double d : distances) {
    const Vec y = y_tilde + d * inward;
    if (d > 0.0 && membership(dom, y) != Membership::Interior)
      throw std::invalid_argument("validate_tau_asymptotics: approach point left D_c");
    const Vec v0 = v(y);

    double tau_num = 0.0;
    const ExitOutcome outcome = exit_time(system, dom, y, v0, 10.0 + 1.0 / (d + 1e-3), cfg);
    if (const auto* rec = std::get_if<ExitRecord>(&outcome))
      tau_num = rec->tau;
    else
      throw NoExit();  // approach points this close to the boundary must exit

    const double pred = table.linear_branch
                            ? tau_linear_asymptotic(dom, y, v0)
                            : tau_quadratic_asymptotic(exit_coefficients(dom, system, y, v0));
    const double denom = std::max(std::abs(tau_num), 1e-300);
    const double rel = (tau_num == 0.0 && pred == 0.0) ? 0.0 : std::abs(tau_num - pred) / denom;
    table.rows.push_back(AsymptoticsRow{d, tau_num, pred, rel});
  }

  bool decreasing = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    decreasing = decreasing && table.rows[i].rel_error < table.rows[i - 1].rel_error;
  const bool small_final =
      !table.rows.empty() && table.rows.back().rel_error < 0.05 &&
      table.rows.back().distance <= 1e-3;
  table.pass = decreasing && small_final;
  return table;
}

}  // namespace neverfall
