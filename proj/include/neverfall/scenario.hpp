#ifndef NEVERFALL_SCENARIO_HPP
#define NEVERFALL_SCENARIO_HPP

#include <optional>
#include <string>

#include "neverfall/models.hpp"
#include "neverfall/search.hpp"
#include "neverfall/toml_lite.hpp"

namespace neverfall {

/// Scenario-file or precondition problem; the CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ProfileSpec {
  std::string family = "zero";  // zero | constant-acceleration | sinusoid |
                                // polynomial | timetable
  double accel = 0.0;
  double amplitude = 0.0;
  double omega = 1.0;
  double phase = 0.0;
  std::vector<double> coeffs;
  std::string path;  // timetable CSV, resolved against the scenario file
  bool periodic = false;
};

struct PendulumSpec {
  ProfileSpec profile;
  double lambda = 0.0;
};

struct RodSpec {
  double omega = 1.0;
  double half_length = 2.0;
};

struct CustomSpec {  // F = x^2 with a small analytic rhs/field family
  double level = 1.0;
  double accel_sin = 0.0;   // xdd = accel_sin sin(x) + accel_lin x + accel_const
  double accel_lin = 0.0;
  double accel_const = 0.0;
  double v_quad = 0.0;      // v(x) = v_quad (c - x^2) + v_lin x + v_const
  double v_lin = 0.0;
  double v_const = 0.0;
};

struct VerifySpec {
  double t_max = 20.0;
  int t_count = 41;
  double xi_radius = 1.0;
  int xi_samples = 8;
  int interior_count = 100;
};

struct ExitSpec {
  double y = 0.0;
  std::optional<double> v0;  // default: the model's initial field at y
  double horizon = 50.0;
};

struct SweepSpec {
  int count = 101;
  std::optional<double> min, max;  // default: the domain endpoints
  double horizon = 20.0;
};

struct AsymptoticsSpec {
  std::string boundary = "upper";  // upper | lower
  std::vector<double> distances = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
};

struct Scenario {
  std::string kind = "pendulum";  // pendulum | rod | custom-1d
  PendulumSpec pendulum;
  RodSpec rod;
  CustomSpec custom;
  std::optional<double> level_override;
  IntegratorConfig integrator;
  SearchConfig search;
  VerifySpec verify;
  ExitSpec exit;
  SweepSpec sweep;
  AsymptoticsSpec asymptotics;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const toml::Table& table, const std::string& base_dir);

/// Everything the pipelines need, built once from a scenario.
struct ModelInstance {
  SecondOrderSystem system;
  SublevelDomain domain;
  VectorField initial_field;
  BoundaryGrid boundary;
  std::optional<TrainProfile> profile;  // pendulum only
};

ModelInstance instantiate(const Scenario& scenario);

/// Timetable CSV with header "t,w".
void read_timetable_csv(const std::string& path, std::vector<double>& times,
                        std::vector<double>& positions);

struct VerificationResult {
  DomainConsistencyReport consistency;
  std::optional<TrainProfile::Report> profile_report;
  InequalityReport inequality;
  InitialFieldReport initial_field;
  /// Worst case of the boundary term over the declared |w''| bound; part of
  /// the pass verdict when available.
  std::optional<double> bounded_drive_margin;
  bool pass = false;
};

VerificationResult run_verification(const Scenario& scenario, const ModelInstance& model);

}  // namespace neverfall

#endif
