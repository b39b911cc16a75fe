#ifndef NEVERFALL_REPORT_HPP
#define NEVERFALL_REPORT_HPP

#include <json.hpp>
#include <string>

#include "neverfall/exit.hpp"
#include "neverfall/scenario.hpp"
#include "neverfall/search.hpp"

namespace neverfall {

using Json = nlohmann::json;

inline constexpr const char* kToolName = "neverfall";
inline constexpr const char* kToolVersion = "0.1.0";

/// 17 significant digits, enough to round-trip a double exactly.
std::string format_g17(double v);

Json to_json(const Vec& v);
Json to_json(const TrajectoryState& s);
Json to_json(const ExitRecord& rec);
Json to_json(const SurvivalRecord& rec);
Json to_json(const ExitOutcome& outcome);
Json to_json(const InequalityReport& report);
Json to_json(const InitialFieldReport& report);
Json to_json(const DomainConsistencyReport& report);
Json to_json(const TrainProfile::Report& report);
Json to_json(const AsymptoticsTable& table);
Json to_json(const BisectionTrace& trace);
Json to_json(const SurvivorCertificate& cert);
Json to_json(const VerificationResult& result);
Json scenario_to_json(const Scenario& scenario);

/// Scenario rendered back to a loadable TOML document; a run is reproducible
/// from its report alone.
std::string scenario_to_toml(const Scenario& scenario);

const char* outcome_name(ProbeOutcome outcome);

/// One sweep row: outcome of exit_time from y.
struct SweepRow {
  double y = 0.0;
  ProbeOutcome outcome = ProbeOutcome::Survived;
  double tau_or_clearance = 0.0;  // exit time, or survival clearance
  std::optional<ExitSide> side;
};

Json to_json(const std::vector<SweepRow>& rows);

/// Full run document: scenario echo, verification block, per-command payload.
/// Everything except "timings_ms" is deterministic for a fixed scenario.
struct RunReport {
  std::string command;
  Json scenario;
  Json verification;
  Json payload;
  Json timings_ms;

  Json to_json() const;
};

// CSV emitters ("%.17g" everywhere, stable layouts).
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryState>& samples,
                          const SublevelDomain& dom);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_asymptotics_csv(std::ostream& out, const AsymptoticsTable& table);

/// Replay side of the certificate schema: enough to re-run the witness.
struct CertificateReplay {
  double witness = 0.0;
  double horizon = 0.0;
  double min_clearance = 0.0;
};
CertificateReplay certificate_replay_from_json(const Json& doc);

}  // namespace neverfall

#endif
