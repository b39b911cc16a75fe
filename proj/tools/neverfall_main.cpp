// Scenario-driven front end: verify | exit | search | sweep | asymptotics.
// Exit codes: 0 success, 1 config/precondition error, 2 hypothesis failure,
// 3 search failure.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "neverfall/report.hpp"

namespace nf = neverfall;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

nf::Vec vec1(double y) {
  nf::Vec v(1);
  v[0] = y;
  return v;
}

struct Common {
  std::string scenario_path;
  std::string out_dir = ".";
};

void write_file(const std::string& out_dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(out_dir);
  const std::string path = (std::filesystem::path(out_dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw nf::ConfigError("cannot write " + path);
  out << content;
  std::cout << "wrote " << path << "\n";
}

void emit_report(const Common& common, nf::RunReport& report, Clock::time_point start) {
  report.timings_ms["total"] = ms_since(start);
  write_file(common.out_dir, "report.json", report.to_json().dump(2) + "\n");
}

nf::RunReport base_report(const std::string& command, const nf::Scenario& scenario,
                          const nf::VerificationResult& verification) {
  nf::RunReport report;
  report.command = command;
  report.scenario = nf::scenario_to_json(scenario);
  report.verification = nf::to_json(verification);
  report.payload = nf::Json::object();
  report.timings_ms = nf::Json::object();
  return report;
}

int cmd_verify(const Common& common) {
  const auto start = Clock::now();
  const nf::Scenario scenario = nf::load_scenario(common.scenario_path);
  const nf::ModelInstance model = nf::instantiate(scenario);
  const nf::VerificationResult verification = nf::run_verification(scenario, model);

  nf::RunReport report = base_report("verify", scenario, verification);
  emit_report(common, report, start);

  std::cout << "boundary inequality margin: " << nf::format_g17(verification.inequality.margin)
            << "\ninitial-field minimum:      "
            << nf::format_g17(verification.initial_field.min_value) << "\n";
  if (verification.bounded_drive_margin)
    std::cout << "worst-case drive margin:    "
              << nf::format_g17(*verification.bounded_drive_margin) << "\n";
  std::cout << (verification.pass ? "hypotheses verified\n" : "HYPOTHESIS FAILURE\n");
  return verification.pass ? 0 : 2;
}

int cmd_exit(const Common& common, double y_flag, double v0_flag, double horizon_flag,
             bool has_y, bool has_v0, bool has_horizon, bool trace) {
  const auto start = Clock::now();
  const nf::Scenario scenario = nf::load_scenario(common.scenario_path);
  const nf::ModelInstance model = nf::instantiate(scenario);
  const nf::VerificationResult verification = nf::run_verification(scenario, model);

  const double y = has_y ? y_flag : scenario.exit.y;
  const double horizon = has_horizon ? horizon_flag : scenario.exit.horizon;
  double v0 = model.initial_field(vec1(y))[0];
  if (scenario.exit.v0) v0 = *scenario.exit.v0;
  if (has_v0) v0 = v0_flag;

  std::vector<nf::TrajectoryState> samples;
  const nf::TrajectoryObserver observer =
      trace ? nf::TrajectoryObserver(
                  [&samples](const nf::TrajectoryState& s) { samples.push_back(s); })
            : nf::TrajectoryObserver{};
  const nf::ExitOutcome outcome = nf::exit_time(model.system, model.domain, vec1(y), vec1(v0),
                                                horizon, scenario.integrator, observer);

  nf::RunReport report = base_report("exit", scenario, verification);
  report.payload = nf::Json{
      {"y", y}, {"v0", v0}, {"horizon", horizon}, {"outcome", nf::to_json(outcome)}};
  if (trace) {
    std::ostringstream csv;
    nf::write_trajectory_csv(csv, samples, model.domain);
    write_file(common.out_dir, "trajectory.csv", csv.str());
  }
  emit_report(common, report, start);

  if (const auto* rec = std::get_if<nf::ExitRecord>(&outcome)) {
    std::cout << "exit at tau = " << nf::format_g17(rec->tau) << " through the "
              << (rec->side == nf::ExitSide::Lower ? "lower" : "upper")
              << " boundary, transversality " << nf::format_g17(rec->transversality) << "\n";
  } else {
    const auto& surv = std::get<nf::SurvivalRecord>(outcome);
    std::cout << "survived to t = " << nf::format_g17(surv.horizon) << " with clearance "
              << nf::format_g17(surv.min_clearance) << "\n";
  }
  return 0;
}

int cmd_search(const Common& common, bool trace) {
  const auto start = Clock::now();
  const nf::Scenario scenario = nf::load_scenario(common.scenario_path);
  const nf::ModelInstance model = nf::instantiate(scenario);
  const nf::VerificationResult verification = nf::run_verification(scenario, model);
  if (!verification.pass)
    std::cerr << "warning: hypotheses unverified; searching anyway\n";

  nf::RunReport report = base_report("search", scenario, verification);
  try {
    const nf::SurvivorCertificate cert = nf::bisect_survivor_1d(
        model.system, model.domain, model.initial_field, scenario.search,
        scenario.integrator);
    report.payload = nf::Json{{"certificate", nf::to_json(cert)}};
    write_file(common.out_dir, "certificate.json", nf::to_json(cert).dump(2) + "\n");
    if (trace) {
      std::vector<nf::TrajectoryState> samples;
      nf::exit_time(model.system, model.domain, vec1(cert.witness),
                    model.initial_field(vec1(cert.witness)), cert.horizon,
                    scenario.integrator,
                    [&samples](const nf::TrajectoryState& s) { samples.push_back(s); });
      std::ostringstream csv;
      nf::write_trajectory_csv(csv, samples, model.domain);
      write_file(common.out_dir, "trajectory.csv", csv.str());
    }
    emit_report(common, report, start);
    std::cout << "witness " << nf::format_g17(cert.witness)
              << " survives to t = " << nf::format_g17(cert.horizon) << "; interval width "
              << nf::format_g17(cert.width()) << "\n";
    return 0;
  } catch (const nf::BracketLost& e) {
    report.payload = nf::Json{{"error", e.what()}, {"trace", nf::to_json(e.trace)}};
    emit_report(common, report, start);
    std::cerr << "search failed: " << e.what() << "\n";
    return 3;
  } catch (const nf::SearchExhausted& e) {
    report.payload = nf::Json{{"error", e.what()}, {"trace", nf::to_json(e.trace)}};
    emit_report(common, report, start);
    std::cerr << "search failed: " << e.what() << "\n";
    return 3;
  }
}

int cmd_sweep(const Common& common, double grid_min, double grid_max, int count,
              double horizon, bool has_min, bool has_max, bool has_count, bool has_horizon) {
  const auto start = Clock::now();
  const nf::Scenario scenario = nf::load_scenario(common.scenario_path);
  const nf::ModelInstance model = nf::instantiate(scenario);
  const nf::VerificationResult verification = nf::run_verification(scenario, model);

  const auto [end_lo, end_hi] = nf::domain_endpoints_1d(model.domain);
  const double lo = has_min ? grid_min : scenario.sweep.min.value_or(end_lo);
  const double hi = has_max ? grid_max : scenario.sweep.max.value_or(end_hi);
  const int n = has_count ? count : scenario.sweep.count;
  const double t_end = has_horizon ? horizon : scenario.sweep.horizon;
  if (!(lo < hi) || n < 1) throw nf::ConfigError("sweep: need grid min < max and count >= 1");

  std::vector<nf::SweepRow> rows;
  for (int i = 0; i < n; ++i) {
    const double y = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    const nf::ExitOutcome outcome =
        nf::exit_time(model.system, model.domain, vec1(y), model.initial_field(vec1(y)),
                      t_end, scenario.integrator);
    nf::SweepRow row;
    row.y = y;
    if (const auto* rec = std::get_if<nf::ExitRecord>(&outcome)) {
      row.outcome = *rec->side == nf::ExitSide::Lower ? nf::ProbeOutcome::Lower
                                                      : nf::ProbeOutcome::Upper;
      row.tau_or_clearance = rec->tau;
      row.side = rec->side;
    } else {
      const auto& surv = std::get<nf::SurvivalRecord>(outcome);
      row.outcome = nf::ProbeOutcome::Survived;
      row.tau_or_clearance = surv.min_clearance;
    }
    rows.push_back(row);
  }

  nf::RunReport report = base_report("sweep", scenario, verification);
  report.payload = nf::Json{{"horizon", t_end}, {"rows", nf::to_json(rows)}};
  std::ostringstream csv;
  nf::write_sweep_csv(csv, rows);
  write_file(common.out_dir, "sweep.csv", csv.str());
  emit_report(common, report, start);

  int survivors = 0;
  for (const auto& r : rows) survivors += r.outcome == nf::ProbeOutcome::Survived;
  std::cout << rows.size() << " starts, " << survivors
            << " survived to t = " << nf::format_g17(t_end) << "\n";
  return 0;
}

int cmd_asymptotics(const Common& common, const std::string& boundary_flag,
                    const std::string& distances_flag) {
  const auto start = Clock::now();
  nf::Scenario scenario = nf::load_scenario(common.scenario_path);
  if (!boundary_flag.empty()) {
    if (boundary_flag != "upper" && boundary_flag != "lower")
      throw nf::ConfigError("--boundary must be upper | lower");
    scenario.asymptotics.boundary = boundary_flag;
  }
  if (!distances_flag.empty()) {
    scenario.asymptotics.distances.clear();
    std::istringstream in(distances_flag);
    std::string token;
    while (std::getline(in, token, ',')) {
      try {
        scenario.asymptotics.distances.push_back(std::stod(token));
      } catch (const std::exception&) {
        throw nf::ConfigError("--distances: malformed number '" + token + "'");
      }
    }
  }
  const nf::ModelInstance model = nf::instantiate(scenario);
  const nf::VerificationResult verification = nf::run_verification(scenario, model);

  const double b = std::sqrt(model.domain.level);
  const nf::Vec y_tilde = vec1(scenario.asymptotics.boundary == "lower" ? -b : b);
  const nf::AsymptoticsTable table =
      nf::validate_tau_asymptotics(model.system, model.domain, model.initial_field, y_tilde,
                                   scenario.asymptotics.distances, scenario.integrator);

  nf::RunReport report = base_report("asymptotics", scenario, verification);
  report.payload = nf::Json{{"table", nf::to_json(table)}};
  std::ostringstream csv;
  nf::write_asymptotics_csv(csv, table);
  write_file(common.out_dir, "asymptotics.csv", csv.str());
  emit_report(common, report, start);

  for (const auto& row : table.rows)
    std::cout << "d = " << nf::format_g17(row.distance)
              << "  tau = " << nf::format_g17(row.tau_numeric)
              << "  predicted = " << nf::format_g17(row.tau_predicted)
              << "  rel err = " << nf::format_g17(row.rel_error) << "\n";
  std::cout << (table.pass ? "asymptotics converge\n" : "asymptotics DID NOT converge\n");
  return table.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bounded-solution toolkit: hypothesis verification, first-exit times,\n"
               "and survivor search for second-order systems"};
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&common](CLI::App* cmd) {
    cmd->add_option("--scenario", common.scenario_path, "scenario TOML file")->required();
    cmd->add_option("--out", common.out_dir, "output directory (default .)");
  };

  auto* verify = app.add_subcommand("verify", "check the existence-theorem hypotheses");
  add_common(verify);

  auto* exit_cmd = app.add_subcommand("exit", "first-exit time from one initial condition");
  add_common(exit_cmd);
  double y = 0.0, v0 = 0.0, horizon = 0.0;
  bool trace = false;
  auto* y_opt = exit_cmd->add_option("--y", y, "initial position");
  auto* v0_opt = exit_cmd->add_option("--v0", v0, "initial velocity override");
  auto* hz_opt = exit_cmd->add_option("--horizon", horizon, "time horizon");
  exit_cmd->add_flag("--trace", trace, "write trajectory.csv");

  auto* search = app.add_subcommand("search", "bisect for a never-escaping start");
  add_common(search);
  bool search_trace = false;
  search->add_flag("--trace", search_trace, "write the witness trajectory");

  auto* sweep = app.add_subcommand("sweep", "exit outcomes over a grid of starts");
  add_common(sweep);
  double grid_min = 0.0, grid_max = 0.0;
  int count = 0;
  double sweep_horizon = 0.0;
  auto* min_opt = sweep->add_option("--grid-min", grid_min, "lowest start");
  auto* max_opt = sweep->add_option("--grid-max", grid_max, "highest start");
  auto* count_opt = sweep->add_option("--grid-count", count, "number of starts");
  auto* shz_opt = sweep->add_option("--horizon", sweep_horizon, "time horizon");

  auto* asym = app.add_subcommand("asymptotics", "near-boundary exit-time expansion check");
  add_common(asym);
  std::string boundary, distances;
  asym->add_option("--boundary", boundary, "upper | lower");
  asym->add_option("--distances", distances, "comma-separated approach distances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify(common);
    if (exit_cmd->parsed())
      return cmd_exit(common, y, v0, horizon, y_opt->count() > 0, v0_opt->count() > 0,
                      hz_opt->count() > 0, trace);
    if (search->parsed()) return cmd_search(common, search_trace);
    if (sweep->parsed())
      return cmd_sweep(common, grid_min, grid_max, count, sweep_horizon,
                       min_opt->count() > 0, max_opt->count() > 0, count_opt->count() > 0,
                       shz_opt->count() > 0);
    if (asym->parsed()) return cmd_asymptotics(common, boundary, distances);
  } catch (const nf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
