#ifndef NEVERFALL_EXIT_HPP
#define NEVERFALL_EXIT_HPP

#include <optional>
#include <variant>
#include <vector>

#include "neverfall/domain.hpp"
#include "neverfall/integrate.hpp"

namespace neverfall {

/// Raised by retraction_point when the trajectory never reaches the boundary
/// within the horizon (the desired outcome elsewhere, an error here).
struct NoExit : std::runtime_error {
  NoExit() : std::runtime_error("trajectory survived to the horizon; no retraction point") {}
};

/// Raised by tau_linear_asymptotic when dF(y)[v] is not positive.
struct NotApplicable : std::runtime_error {
  NotApplicable() : std::runtime_error("linear exit asymptotic needs dF(y)[v] > 0") {}
};

/// Raised by tau_quadratic_asymptotic when the quadratic coefficient
/// degenerates; fall back to the linear formula.
struct DegenerateCase : std::runtime_error {
  DegenerateCase() : std::runtime_error("quadratic exit asymptotic needs A > 0") {}
};

/// Which endpoint of a one-dimensional boundary the trajectory reached.
enum class ExitSide { Lower, Upper };

/// Threshold below which an exit counts as grazing; Lemma-1 transversality
/// rules these out under verified hypotheses, so they are diagnostics.
constexpr double kGrazingTol = 1e-8;

struct ExitRecord {
  double tau = 0.0;                   // first boundary-hitting time
  TrajectoryState exit_state;         // F(x) = c within tolerance
  double transversality = 0.0;        // dF(x(tau))[xdot(tau)]
  std::optional<ExitSide> side;       // set when m == 1
  double bracket_width = 0.0;         // time-bracket width achieved by refinement
  bool grazing = false;               // |transversality| < kGrazingTol
  bool transversality_anomaly = false;  // <= 0 from a strictly interior start
};

struct SurvivalRecord {
  double horizon = 0.0;
  TrajectoryState final_state;
  /// min over sampled dense output of (c - F(x(t))); a lower-bound estimate
  /// at the configured sampling density.
  double min_clearance = 0.0;
};

using ExitOutcome = std::variant<ExitRecord, SurvivalRecord>;

/// Optional per-sample observer; receives every state at which the boundary
/// predicate is evaluated (step endpoints and interior dense samples).
using TrajectoryObserver = std::function<void(const TrajectoryState&)>;

/// First-exit computation from y with initial velocity v0. Boundary starts
/// return tau = 0 immediately. Interior starts integrate with the stop
/// predicate F(x) - c; the crossing is refined by bisection on the dense
/// interpolant to a time bracket below 1e-12.
ExitOutcome exit_time(const SecondOrderSystem& system, const SublevelDomain& dom, const Vec& y,
                      const Vec& v0, double horizon, const IntegratorConfig& cfg,
                      const TrajectoryObserver& observer = {});

/// The retraction y -> x(tau(y), y). Identity on the boundary; throws NoExit
/// for survivors.
Vec retraction_point(const SecondOrderSystem& system, const SublevelDomain& dom, const Vec& y,
                     const VectorField& v, double horizon, const IntegratorConfig& cfg);

/// Leading-order exit time (c - F(y)) / dF(y)[v0], the boundary-transversal
/// branch of the near-boundary expansion.
double tau_linear_asymptotic(const SublevelDomain& dom, const Vec& y, const Vec& v0);

/// Coefficients of the quadratic exit equation A u^2 + B u + C = 0:
///   A = (dF(y)[f(0, y, v)] + d2F(y)[v, v]) / 2,  B = dF(y)[v],  C = F(y) - c.
struct QuadraticExitCoefficients {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
};

QuadraticExitCoefficients exit_coefficients(const SublevelDomain& dom,
                                            const SecondOrderSystem& system, const Vec& y,
                                            const Vec& v0);

/// Positive root u = (-B + sqrt(B^2 - 4AC)) / (2A), evaluated in the
/// cancellation-free form. Requires A > 0 and C <= 0; u = 0 iff C = 0 and
/// B >= 0.
double tau_quadratic_asymptotic(const QuadraticExitCoefficients& q);

struct AsymptoticsRow {
  double distance = 0.0;
  double tau_numeric = 0.0;
  double tau_predicted = 0.0;
  double rel_error = 0.0;
};

struct AsymptoticsTable {
  std::vector<AsymptoticsRow> rows;
  bool linear_branch = false;  // which expansion was used (decided at y_tilde)
  bool pass = false;           // errors strictly decreasing, final < 5%
};

/// Convergence check of the exit-time asymptotics along an inward approach
/// y_k = y_tilde - d_k * n to the boundary point y_tilde. The branch is
/// chosen at y_tilde: dF(y_tilde)[v(y_tilde)] > 0 selects the linear
/// formula, otherwise the quadratic root (with coefficients evaluated at
/// each y_k) applies.
AsymptoticsTable validate_tau_asymptotics(const SecondOrderSystem& system,
                                          const SublevelDomain& dom, const VectorField& v,
                                          const Vec& y_tilde,
                                          const std::vector<double>& distances,
                                          const IntegratorConfig& cfg);

}  // namespace neverfall

#endif
