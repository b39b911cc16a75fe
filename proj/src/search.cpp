#include "neverfall/search.hpp"

#include <cmath>
#include <optional>

namespace neverfall {

namespace {

Vec vec1(double y) {
  Vec v(1);
  v[0] = y;
  return v;
}

struct Classified {
  ProbeOutcome outcome;
  double tau;  // exit time, or horizon for survivors
  std::optional<SurvivalRecord> survival;
};

Classified classify(const SecondOrderSystem& system, const SublevelDomain& dom, double y,
                    const VectorField& v, double horizon, const IntegratorConfig& cfg) {
  const Vec y1 = vec1(y);
  const ExitOutcome outcome = exit_time(system, dom, y1, v(y1), horizon, cfg);
  if (const auto* rec = std::get_if<ExitRecord>(&outcome)) {
    const ProbeOutcome side =
        rec->side.value() == ExitSide::Lower ? ProbeOutcome::Lower : ProbeOutcome::Upper;
    return Classified{side, rec->tau, std::nullopt};
  }
  const auto& surv = std::get<SurvivalRecord>(outcome);
  return Classified{ProbeOutcome::Survived, surv.horizon, surv};
}

}  // namespace

ProbeOutcome exit_side_1d(const SecondOrderSystem& system, const SublevelDomain& dom, double y,
                          const VectorField& v, double horizon, const IntegratorConfig& cfg) {
  if (dom.dimension != 1 || system.dimension != 1)
    throw std::invalid_argument("exit_side_1d: system and domain must be one-dimensional");
  return classify(system, dom, y, v, horizon, cfg).outcome;
}

SurvivorCertificate bisect_survivor_1d(const SecondOrderSystem& system,
                                       const SublevelDomain& dom, const VectorField& v,
                                       const SearchConfig& search_cfg,
                                       const IntegratorConfig& integrator_cfg) {
  if (dom.dimension != 1 || system.dimension != 1)
    throw std::invalid_argument("bisect_survivor_1d: system and domain must be one-dimensional");
  search_cfg.validate();

  const auto [end_lo, end_hi] = domain_endpoints_1d(dom);
  double lo = end_lo, hi = end_hi;

  SurvivorCertificate cert;
  cert.tolerance = search_cfg.interval_tol;
  BisectionTrace& trace = cert.trace;

  // The boundary endpoints classify as their own side with tau = 0.
  trace.probes.push_back(ProbeRecord{lo, ProbeOutcome::Lower, 0.0, lo, hi});
  trace.probes.push_back(ProbeRecord{hi, ProbeOutcome::Upper, 0.0, lo, hi});

  struct Witness {
    double y;
    SurvivalRecord record;
  };
  std::optional<Witness> witness;

  const double tol = search_cfg.interval_tol;
  const std::size_t last_index = search_cfg.horizons.size() - 1;

  for (std::size_t hz = 0; hz < search_cfg.horizons.size(); ++hz) {
    const double horizon = search_cfg.horizons[hz];
    int probes_left = search_cfg.max_steps_per_horizon;

    const auto probe = [&](double y) {
      if (probes_left-- <= 0)
        throw SearchExhausted("probe budget exhausted at horizon " + std::to_string(horizon),
                              trace);
      Classified c = classify(system, dom, y, v, horizon, integrator_cfg);
      trace.probes.push_back(ProbeRecord{y, c.outcome, c.tau, lo, hi});
      return c;
    };
    const auto record_bracket = [&] {
      trace.probes.back().lo = lo;
      trace.probes.back().hi = hi;
    };

    // A witness certified at a shorter horizon gets re-probed; if it no
    // longer survives, its exit side tightens the bracket.
    if (witness) {
      Classified c = probe(witness->y);
      if (c.outcome == ProbeOutcome::Survived) {
        witness->record = *c.survival;
      } else {
        if (c.outcome == ProbeOutcome::Lower)
          lo = witness->y;
        else
          hi = witness->y;
        witness.reset();
      }
      record_bracket();
    }

    while (!witness) {
      const double mid = 0.5 * (lo + hi);
      if (!(lo < mid && mid < hi))
        throw SearchExhausted("bracket exhausted to machine precision at horizon " +
                                  std::to_string(horizon),
                              trace);
      Classified c = probe(mid);
      switch (c.outcome) {
        case ProbeOutcome::Lower: lo = mid; break;
        case ProbeOutcome::Upper: hi = mid; break;
        case ProbeOutcome::Survived: witness = Witness{mid, *c.survival}; break;
      }
      record_bracket();
    }

    if (hz == last_index) {
      // Narrow the bracket around the witness. Flank probes that survive
      // extend the known survivor sub-interval [w_lo, w_hi]; probes that
      // exit must exit toward their own flank, anything else contradicts
      // the nested-interval structure.
      double w_lo = witness->y, w_hi = witness->y;
      while (hi - lo > tol) {
        const double left_gap = w_lo - lo, right_gap = hi - w_hi;
        const double gap = std::max(left_gap, right_gap);
        if (gap <= 0.25 * tol) break;  // survivor set itself is wider than tol
        if (left_gap >= right_gap) {
          const double p = lo + 0.5 * left_gap;
          if (!(lo < p && p < w_lo)) break;
          Classified c = probe(p);
          if (c.outcome == ProbeOutcome::Lower)
            lo = p;
          else if (c.outcome == ProbeOutcome::Survived)
            w_lo = p;
          else
            throw BracketLost("left-flank probe exited Upper below a survivor", trace);
          record_bracket();
        } else {
          const double p = hi - 0.5 * right_gap;
          if (!(w_hi < p && p < hi)) break;
          Classified c = probe(p);
          if (c.outcome == ProbeOutcome::Upper)
            hi = p;
          else if (c.outcome == ProbeOutcome::Survived)
            w_hi = p;
          else
            throw BracketLost("right-flank probe exited Lower above a survivor", trace);
          record_bracket();
        }
      }
    }

    cert.horizons.push_back(HorizonRecord{horizon, lo, hi, witness->y});
  }

  cert.lo = lo;
  cert.hi = hi;
  cert.horizon = search_cfg.horizons.back();
  cert.witness = witness->y;
  cert.witness_record = witness->record;
  return cert;
}

}  // namespace neverfall
