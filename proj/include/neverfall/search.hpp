#ifndef NEVERFALL_SEARCH_HPP
#define NEVERFALL_SEARCH_HPP

#include <vector>

#include "neverfall/exit.hpp"

namespace neverfall {

struct SearchConfig {
  /// Horizons certified in turn; the certificate reports the last one.
  std::vector<double> horizons = {5.0, 10.0, 20.0, 40.0, 80.0};
  /// Target width of the final initial-condition interval.
  double interval_tol = 1e-8;
  int max_steps_per_horizon = 200;

  void validate() const {
    if (horizons.empty()) throw std::invalid_argument("search: empty horizon schedule");
    for (std::size_t i = 0; i + 1 < horizons.size(); ++i)
      if (!(horizons[i] < horizons[i + 1]))
        throw std::invalid_argument("search: horizon schedule must be strictly increasing");
    if (!(horizons.front() > 0.0)) throw std::invalid_argument("search: horizons must be > 0");
    if (!(interval_tol > 0.0)) throw std::invalid_argument("search: interval_tol must be > 0");
    if (max_steps_per_horizon < 1)
      throw std::invalid_argument("search: max_steps_per_horizon must be >= 1");
  }
};

enum class ProbeOutcome { Lower, Upper, Survived };

struct ProbeRecord {
  double y = 0.0;
  ProbeOutcome outcome = ProbeOutcome::Survived;
  double tau = 0.0;  // exit time, or the horizon for survivors
  double lo = 0.0, hi = 0.0;  // bracket after applying the probe
};

struct BisectionTrace {
  std::vector<ProbeRecord> probes;
};

/// Same-side bracket or an exit-side inconsistent with the nested-interval
/// structure. Fatal by design: it contradicts the continuity of the exit map
/// and must not be silently repaired.
struct BracketLost : std::runtime_error {
  BisectionTrace trace;
  explicit BracketLost(std::string what, BisectionTrace tr)
      : std::runtime_error(std::move(what)), trace(std::move(tr)) {}
};

/// Probe budget exhausted without certifying the horizon (survivor set
/// thinner than the achievable resolution, or interval exhausted to
/// machine precision).
struct SearchExhausted : std::runtime_error {
  BisectionTrace trace;
  explicit SearchExhausted(std::string what, BisectionTrace tr)
      : std::runtime_error(std::move(what)), trace(std::move(tr)) {}
};

struct HorizonRecord {
  double horizon = 0.0;
  double lo = 0.0, hi = 0.0;
  double witness = 0.0;
};

/// Finite-horizon witness of a never-escaping initial condition: an interval
/// whose endpoints exit through opposite boundary points (or survive), plus a
/// probe that survives the certified horizon.
struct SurvivorCertificate {
  double lo = 0.0, hi = 0.0;        // final bracket
  double horizon = 0.0;             // last certified horizon
  double witness = 0.0;             // surviving probe
  SurvivalRecord witness_record;
  double tolerance = 0.0;           // configured width target
  std::vector<HorizonRecord> horizons;
  BisectionTrace trace;

  double width() const { return hi - lo; }
  double min_clearance() const { return witness_record.min_clearance; }
};

/// Classifies the trajectory from y (velocity v(y)) by which boundary
/// endpoint it reaches before the horizon. Boundary starts classify as their
/// own side with tau = 0.
ProbeOutcome exit_side_1d(const SecondOrderSystem& system, const SublevelDomain& dom, double y,
                          const VectorField& v, double horizon, const IntegratorConfig& cfg);

/// Exit-side bisection for a surviving initial condition, one horizon at a
/// time. Per horizon the bracket [lo, hi] (sides Lower/Upper) is bisected
/// until a midpoint survives; at the final horizon the bracket is then
/// narrowed around the surviving probe until its width reaches the
/// tolerance (or the survivor set itself is wider, in which case the
/// achieved width is reported honestly).
SurvivorCertificate bisect_survivor_1d(const SecondOrderSystem& system,
                                       const SublevelDomain& dom, const VectorField& v,
                                       const SearchConfig& search_cfg,
                                       const IntegratorConfig& integrator_cfg);

}  // namespace neverfall

#endif
