#include "neverfall/report.hpp"

#include <cstdio>
#include <ostream>

namespace neverfall {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json to_json(const Vec& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Json to_json(const TrajectoryState& s) {
  return Json{{"t", s.t}, {"x", to_json(s.x)}, {"xdot", to_json(s.xdot)}};
}

Json to_json(const ExitRecord& rec) {
  Json j{{"kind", "exit"},
         {"tau", rec.tau},
         {"state", to_json(rec.exit_state)},
         {"transversality", rec.transversality},
         {"bracket_width", rec.bracket_width},
         {"grazing", rec.grazing},
         {"transversality_anomaly", rec.transversality_anomaly}};
  if (rec.side) j["side"] = *rec.side == ExitSide::Lower ? "lower" : "upper";
  return j;
}

Json to_json(const SurvivalRecord& rec) {
  return Json{{"kind", "survival"},
              {"horizon", rec.horizon},
              {"state", to_json(rec.final_state)},
              {"min_clearance", rec.min_clearance}};
}

Json to_json(const ExitOutcome& outcome) {
  if (const auto* rec = std::get_if<ExitRecord>(&outcome)) return to_json(*rec);
  return to_json(std::get<SurvivalRecord>(outcome));
}

Json to_json(const InequalityReport& report) {
  Json j{{"margin", report.margin},
         {"worst_time", report.worst_time},
         {"min_tangent_hessian_eig", report.min_tangent_hessian_eig},
         {"pass", report.pass}};
  if (report.worst_point.size()) j["worst_point"] = to_json(report.worst_point);
  if (report.worst_xi.size()) j["worst_xi"] = to_json(report.worst_xi);
  return j;
}

Json to_json(const InitialFieldReport& report) {
  Json j{{"min_value", report.min_value}, {"pass", report.pass}};
  if (report.worst_point.size()) j["worst_point"] = to_json(report.worst_point);
  return j;
}

Json to_json(const DomainConsistencyReport& report) {
  return Json{{"max_gradient_rel_err", report.max_gradient_rel_err},
              {"max_hessian_rel_err", report.max_hessian_rel_err},
              {"min_boundary_gradient_norm", report.min_boundary_gradient_norm},
              {"pass", report.pass}};
}

Json to_json(const TrainProfile::Report& report) {
  return Json{{"max_acceleration_rel_err", report.max_acceleration_rel_err},
              {"max_sampled_acceleration", report.max_sampled_acceleration},
              {"bound_ok", report.bound_ok},
              {"pass", report.pass}};
}

Json to_json(const AsymptoticsTable& table) {
  Json rows = Json::array();
  for (const AsymptoticsRow& r : table.rows)
    rows.push_back(Json{{"distance", r.distance},
                        {"tau_numeric", r.tau_numeric},
                        {"tau_predicted", r.tau_predicted},
                        {"rel_error", r.rel_error}});
  return Json{{"branch", table.linear_branch ? "linear" : "quadratic"},
              {"rows", rows},
              {"pass", table.pass}};
}

const char* outcome_name(ProbeOutcome outcome) {
  switch (outcome) {
    case ProbeOutcome::Lower: return "lower";
    case ProbeOutcome::Upper: return "upper";
    default: return "survived";
  }
}

Json to_json(const BisectionTrace& trace) {
  Json arr = Json::array();
  for (const ProbeRecord& p : trace.probes)
    arr.push_back(Json{{"y", p.y},
                       {"outcome", outcome_name(p.outcome)},
                       {"tau", p.tau},
                       {"lo", p.lo},
                       {"hi", p.hi}});
  return arr;
}

Json to_json(const SurvivorCertificate& cert) {
  Json horizons = Json::array();
  for (const HorizonRecord& h : cert.horizons)
    horizons.push_back(
        Json{{"horizon", h.horizon}, {"lo", h.lo}, {"hi", h.hi}, {"witness", h.witness}});
  return Json{{"type", "survivor-certificate"},
              {"horizon", cert.horizon},
              {"interval", Json{{"lo", cert.lo}, {"hi", cert.hi}, {"width", cert.width()}}},
              {"tolerance", cert.tolerance},
              {"witness", Json{{"y", cert.witness},
                               {"min_clearance", cert.min_clearance()},
                               {"final_state", to_json(cert.witness_record.final_state)}}},
              {"horizons", horizons},
              {"trace", to_json(cert.trace)}};
}

Json to_json(const VerificationResult& result) {
  Json j{{"consistency", to_json(result.consistency)},
         {"boundary_inequality", to_json(result.inequality)},
         {"initial_field", to_json(result.initial_field)},
         {"pass", result.pass}};
  if (result.profile_report) j["profile"] = to_json(*result.profile_report);
  if (result.bounded_drive_margin) j["bounded_drive_margin"] = *result.bounded_drive_margin;
  return j;
}

namespace {

Json profile_to_json(const ProfileSpec& p) {
  Json j{{"family", p.family}};
  if (p.family == "constant-acceleration") j["accel"] = p.accel;
  if (p.family == "sinusoid") {
    j["amplitude"] = p.amplitude;
    j["omega"] = p.omega;
    j["phase"] = p.phase;
  }
  if (p.family == "polynomial") j["coeffs"] = p.coeffs;
  if (p.family == "timetable") {
    j["path"] = p.path;
    j["periodic"] = p.periodic;
  }
  return j;
}

}  // namespace

Json scenario_to_json(const Scenario& s) {
  Json model{{"kind", s.kind}};
  if (s.kind == "pendulum") {
    model["lambda"] = s.pendulum.lambda;
    model["profile"] = profile_to_json(s.pendulum.profile);
  } else if (s.kind == "rod") {
    model["rod"] = Json{{"omega", s.rod.omega}, {"half_length", s.rod.half_length}};
  } else {
    model["custom"] = Json{{"level", s.custom.level},
                           {"accel_sin", s.custom.accel_sin},
                           {"accel_lin", s.custom.accel_lin},
                           {"accel_const", s.custom.accel_const},
                           {"v_quad", s.custom.v_quad},
                           {"v_lin", s.custom.v_lin},
                           {"v_const", s.custom.v_const}};
  }
  Json j{{"model", model},
         {"integrator", Json{{"rel_tol", s.integrator.rel_tol},
                             {"abs_tol", s.integrator.abs_tol},
                             {"initial_step", s.integrator.initial_step},
                             {"min_step", s.integrator.min_step},
                             {"max_step", s.integrator.max_step},
                             {"interior_samples", s.integrator.interior_samples}}},
         {"search", Json{{"horizons", s.search.horizons},
                         {"interval_tol", s.search.interval_tol},
                         {"max_steps_per_horizon", s.search.max_steps_per_horizon}}},
         {"verify", Json{{"t_max", s.verify.t_max},
                         {"t_count", s.verify.t_count},
                         {"xi_radius", s.verify.xi_radius},
                         {"xi_samples", s.verify.xi_samples},
                         {"interior_count", s.verify.interior_count}}},
         {"exit", Json{{"y", s.exit.y}, {"horizon", s.exit.horizon}}},
         {"sweep", Json{{"count", s.sweep.count}, {"horizon", s.sweep.horizon}}},
         {"asymptotics", Json{{"boundary", s.asymptotics.boundary},
                              {"distances", s.asymptotics.distances}}}};
  if (s.exit.v0) j["exit"]["v0"] = *s.exit.v0;
  if (s.sweep.min) j["sweep"]["min"] = *s.sweep.min;
  if (s.sweep.max) j["sweep"]["max"] = *s.sweep.max;
  if (s.level_override) j["domain"] = Json{{"level", *s.level_override}};
  return j;
}

std::string scenario_to_toml(const Scenario& s) {
  std::string out;
  const auto num = [](double v) { return format_g17(v); };
  const auto line = [&out](const std::string& text) { out += text + "\n"; };
  const auto array = [&num](const std::vector<double>& vals) {
    std::string a = "[";
    for (std::size_t i = 0; i < vals.size(); ++i)
      a += (i ? ", " : "") + num(vals[i]);
    return a + "]";
  };

  line("[model]");
  line("kind = \"" + s.kind + "\"");
  if (s.kind == "pendulum") {
    line("lambda = " + num(s.pendulum.lambda));
    const ProfileSpec& p = s.pendulum.profile;
    line("");
    line("[model.profile]");
    line("family = \"" + p.family + "\"");
    if (p.family == "constant-acceleration") line("accel = " + num(p.accel));
    if (p.family == "sinusoid") {
      line("amplitude = " + num(p.amplitude));
      line("omega = " + num(p.omega));
      line("phase = " + num(p.phase));
    }
    if (p.family == "polynomial") line("coeffs = " + array(p.coeffs));
    if (p.family == "timetable") {
      line("path = \"" + p.path + "\"");
      line(std::string("periodic = ") + (p.periodic ? "true" : "false"));
    }
  } else if (s.kind == "rod") {
    line("");
    line("[model.rod]");
    line("omega = " + num(s.rod.omega));
    line("half_length = " + num(s.rod.half_length));
  } else {
    line("");
    line("[model.custom]");
    line("level = " + num(s.custom.level));
    line("accel_sin = " + num(s.custom.accel_sin));
    line("accel_lin = " + num(s.custom.accel_lin));
    line("accel_const = " + num(s.custom.accel_const));
    line("v_quad = " + num(s.custom.v_quad));
    line("v_lin = " + num(s.custom.v_lin));
    line("v_const = " + num(s.custom.v_const));
  }
  if (s.level_override) {
    line("");
    line("[domain]");
    line("level = " + num(*s.level_override));
  }
  line("");
  line("[integrator]");
  line("rel_tol = " + num(s.integrator.rel_tol));
  line("abs_tol = " + num(s.integrator.abs_tol));
  line("initial_step = " + num(s.integrator.initial_step));
  line("min_step = " + num(s.integrator.min_step));
  line("max_step = " + num(s.integrator.max_step));
  line("interior_samples = " + std::to_string(s.integrator.interior_samples));
  line("");
  line("[search]");
  line("horizons = " + array(s.search.horizons));
  line("interval_tol = " + num(s.search.interval_tol));
  line("max_steps_per_horizon = " + std::to_string(s.search.max_steps_per_horizon));
  line("");
  line("[verify]");
  line("t_max = " + num(s.verify.t_max));
  line("t_count = " + std::to_string(s.verify.t_count));
  line("xi_radius = " + num(s.verify.xi_radius));
  line("xi_samples = " + std::to_string(s.verify.xi_samples));
  line("interior_count = " + std::to_string(s.verify.interior_count));
  line("");
  line("[exit]");
  line("y = " + num(s.exit.y));
  if (s.exit.v0) line("v0 = " + num(*s.exit.v0));
  line("horizon = " + num(s.exit.horizon));
  line("");
  line("[sweep]");
  line("count = " + std::to_string(s.sweep.count));
  if (s.sweep.min) line("min = " + num(*s.sweep.min));
  if (s.sweep.max) line("max = " + num(*s.sweep.max));
  line("horizon = " + num(s.sweep.horizon));
  line("");
  line("[asymptotics]");
  line("boundary = \"" + s.asymptotics.boundary + "\"");
  line("distances = " + array(s.asymptotics.distances));
  return out;
}

Json to_json(const std::vector<SweepRow>& rows) {
  Json arr = Json::array();
  for (const SweepRow& r : rows) {
    Json j{{"y", r.y},
           {"outcome", outcome_name(r.outcome)},
           {"tau_or_clearance", r.tau_or_clearance}};
    if (r.side) j["side"] = *r.side == ExitSide::Lower ? "lower" : "upper";
    arr.push_back(j);
  }
  return arr;
}

Json RunReport::to_json() const {
  return Json{{"tool", Json{{"name", kToolName}, {"version", kToolVersion}}},
              {"command", command},
              {"scenario", scenario},
              {"verification", verification},
              {"payload", payload},
              {"timings_ms", timings_ms}};
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryState>& samples,
                          const SublevelDomain& dom) {
  out << "t,x,xdot,F\n";
  for (const TrajectoryState& s : samples) {
    out << format_g17(s.t);
    out << ',' << format_g17(s.x[0]) << ',' << format_g17(s.xdot[0]);
    out << ',' << format_g17(dom.value(s.x)) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "y,outcome,tau_or_clearance,side\n";
  for (const SweepRow& r : rows) {
    out << format_g17(r.y) << ',' << outcome_name(r.outcome) << ','
        << format_g17(r.tau_or_clearance) << ',';
    if (r.side) out << (*r.side == ExitSide::Lower ? "lower" : "upper");
    out << '\n';
  }
}

void write_asymptotics_csv(std::ostream& out, const AsymptoticsTable& table) {
  out << "distance,tau_numeric,tau_predicted,rel_error\n";
  for (const AsymptoticsRow& r : table.rows)
    out << format_g17(r.distance) << ',' << format_g17(r.tau_numeric) << ','
        << format_g17(r.tau_predicted) << ',' << format_g17(r.rel_error) << '\n';
}

CertificateReplay certificate_replay_from_json(const Json& doc) {
  CertificateReplay replay;
  replay.witness = doc.at("witness").at("y").get<double>();
  replay.horizon = doc.at("horizon").get<double>();
  replay.min_clearance = doc.at("witness").at("min_clearance").get<double>();
  return replay;
}

}  // namespace neverfall
