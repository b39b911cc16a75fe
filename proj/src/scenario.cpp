#include "neverfall/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace neverfall {

namespace {

// Tracks which keys were consumed so unknown keys can be rejected.
class TableReader {
 public:
  TableReader(const toml::Table& table, std::string context)
      : table_(table), context_(std::move(context)) {}

  const toml::Value* find(const std::string& key) {
    seen_.insert(key);
    const auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  double number(const std::string& key, double fallback) {
    const toml::Value* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(context_ + "." + key + ": expected a number");
    return v->as_double();
  }

  int integer(const std::string& key, int fallback) {
    const toml::Value* v = find(key);
    if (!v) return fallback;
    if (!std::holds_alternative<std::int64_t>(v->data))
      throw ConfigError(context_ + "." + key + ": expected an integer");
    return static_cast<int>(v->as_int());
  }

  bool boolean(const std::string& key, bool fallback) {
    const toml::Value* v = find(key);
    if (!v) return fallback;
    if (!v->is_bool()) throw ConfigError(context_ + "." + key + ": expected a boolean");
    return v->as_bool();
  }

  std::string text(const std::string& key, std::string fallback) {
    const toml::Value* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(context_ + "." + key + ": expected a string");
    return v->as_string();
  }

  std::optional<double> opt_number(const std::string& key) {
    const toml::Value* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(context_ + "." + key + ": expected a number");
    return v->as_double();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const toml::Value* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError(context_ + "." + key + ": expected an array");
    std::vector<double> out;
    for (const toml::Value& e : v->as_array()) {
      if (!e.is_number())
        throw ConfigError(context_ + "." + key + ": expected an array of numbers");
      out.push_back(e.as_double());
    }
    return out;
  }

  const toml::Table* table(const std::string& key) {
    const toml::Value* v = find(key);
    if (!v) return nullptr;
    if (!v->is_table()) throw ConfigError(context_ + "." + key + ": expected a table");
    return &v->as_table();
  }

  void finish() {
    for (const auto& [key, value] : table_)
      if (!seen_.count(key))
        throw ConfigError("unknown key '" + key + "' in " + context_);
  }

 private:
  const toml::Table& table_;
  std::string context_;
  std::set<std::string> seen_;
};

ProfileSpec parse_profile(const toml::Table& table, const std::string& base_dir) {
  TableReader reader(table, "[model.profile]");
  ProfileSpec spec;
  spec.family = reader.text("family", "zero");
  spec.accel = reader.number("accel", 0.0);
  spec.amplitude = reader.number("amplitude", 0.0);
  spec.omega = reader.number("omega", 1.0);
  spec.phase = reader.number("phase", 0.0);
  spec.coeffs = reader.numbers("coeffs", {});
  spec.path = reader.text("path", "");
  spec.periodic = reader.boolean("periodic", false);
  reader.finish();

  static const std::set<std::string> families = {"zero", "constant-acceleration", "sinusoid",
                                                 "polynomial", "timetable"};
  if (!families.count(spec.family))
    throw ConfigError("unknown profile family '" + spec.family + "'");
  if (spec.family == "timetable") {
    if (spec.path.empty()) throw ConfigError("timetable profile needs 'path'");
    std::filesystem::path p(spec.path);
    if (p.is_relative()) spec.path = (std::filesystem::path(base_dir) / p).string();
  }
  return spec;
}

TrainProfile build_profile(const ProfileSpec& spec) {
  if (spec.family == "zero") return TrainProfile::zero();
  if (spec.family == "constant-acceleration")
    return TrainProfile::constant_acceleration(spec.accel);
  if (spec.family == "sinusoid")
    return TrainProfile::sinusoid(spec.amplitude, spec.omega, spec.phase);
  if (spec.family == "polynomial") return TrainProfile::polynomial(spec.coeffs);
  std::vector<double> times, positions;
  read_timetable_csv(spec.path, times, positions);
  try {
    return profile_from_samples(times, positions, spec.periodic);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("timetable: ") + e.what());
  }
}

}  // namespace

void read_timetable_csv(const std::string& path, std::vector<double>& times,
                        std::vector<double>& positions) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open timetable: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty timetable: " + path);
  // tolerate whitespace and an optional BOM around the expected header
  std::string squashed;
  for (char character : line)
    if (!std::isspace(static_cast<unsigned char>(character)) &&
        static_cast<unsigned char>(character) < 0x80)
      squashed.push_back(character);
  if (squashed != "t,w")
    throw ConfigError("timetable must start with the header 't,w': " + path);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string t_text, w_text;
    if (!std::getline(row, t_text, ',') || !std::getline(row, w_text))
      throw ConfigError("timetable row " + std::to_string(line_no) + ": expected 't,w'");
    try {
      times.push_back(std::stod(t_text));
      positions.push_back(std::stod(w_text));
    } catch (const std::exception&) {
      throw ConfigError("timetable row " + std::to_string(line_no) + ": malformed number");
    }
  }
}

Scenario parse_scenario(const toml::Table& table, const std::string& base_dir) {
  TableReader root(table, "scenario");
  Scenario scenario;

  if (const toml::Table* model = root.table("model")) {
    TableReader reader(*model, "[model]");
    scenario.kind = reader.text("kind", "pendulum");
    scenario.pendulum.lambda = reader.number("lambda", 0.0);
    if (const toml::Table* prof = reader.table("profile"))
      scenario.pendulum.profile = parse_profile(*prof, base_dir);
    if (const toml::Table* rod = reader.table("rod")) {
      TableReader rr(*rod, "[model.rod]");
      scenario.rod.omega = rr.number("omega", 1.0);
      scenario.rod.half_length = rr.number("half_length", 2.0);
      rr.finish();
    }
    if (const toml::Table* custom = reader.table("custom")) {
      TableReader cr(*custom, "[model.custom]");
      scenario.custom.level = cr.number("level", 1.0);
      scenario.custom.accel_sin = cr.number("accel_sin", 0.0);
      scenario.custom.accel_lin = cr.number("accel_lin", 0.0);
      scenario.custom.accel_const = cr.number("accel_const", 0.0);
      scenario.custom.v_quad = cr.number("v_quad", 0.0);
      scenario.custom.v_lin = cr.number("v_lin", 0.0);
      scenario.custom.v_const = cr.number("v_const", 0.0);
      cr.finish();
    }
    reader.finish();
  }
  if (scenario.kind != "pendulum" && scenario.kind != "rod" && scenario.kind != "custom-1d")
    throw ConfigError("model.kind must be pendulum | rod | custom-1d");

  if (const toml::Table* dom = root.table("domain")) {
    TableReader reader(*dom, "[domain]");
    scenario.level_override = reader.opt_number("level");
    reader.finish();
    if (scenario.level_override && !(*scenario.level_override > 0.0))
      throw ConfigError("domain.level must be positive");
  }

  if (const toml::Table* integ = root.table("integrator")) {
    TableReader reader(*integ, "[integrator]");
    scenario.integrator.rel_tol = reader.number("rel_tol", scenario.integrator.rel_tol);
    scenario.integrator.abs_tol = reader.number("abs_tol", scenario.integrator.abs_tol);
    scenario.integrator.initial_step =
        reader.number("initial_step", scenario.integrator.initial_step);
    scenario.integrator.min_step = reader.number("min_step", scenario.integrator.min_step);
    scenario.integrator.max_step = reader.number("max_step", scenario.integrator.max_step);
    scenario.integrator.interior_samples =
        reader.integer("interior_samples", scenario.integrator.interior_samples);
    reader.finish();
    try {
      scenario.integrator.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  if (const toml::Table* search = root.table("search")) {
    TableReader reader(*search, "[search]");
    scenario.search.horizons = reader.numbers("horizons", scenario.search.horizons);
    scenario.search.interval_tol =
        reader.number("interval_tol", scenario.search.interval_tol);
    scenario.search.max_steps_per_horizon =
        reader.integer("max_steps_per_horizon", scenario.search.max_steps_per_horizon);
    reader.finish();
    try {
      scenario.search.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  if (const toml::Table* verify = root.table("verify")) {
    TableReader reader(*verify, "[verify]");
    scenario.verify.t_max = reader.number("t_max", scenario.verify.t_max);
    scenario.verify.t_count = reader.integer("t_count", scenario.verify.t_count);
    scenario.verify.xi_radius = reader.number("xi_radius", scenario.verify.xi_radius);
    scenario.verify.xi_samples = reader.integer("xi_samples", scenario.verify.xi_samples);
    scenario.verify.interior_count =
        reader.integer("interior_count", scenario.verify.interior_count);
    reader.finish();
    if (!(scenario.verify.t_max >= 0.0) || scenario.verify.t_count < 1 ||
        !(scenario.verify.xi_radius > 0.0) || scenario.verify.interior_count < 1)
      throw ConfigError("[verify]: invalid sampling parameters");
  }

  if (const toml::Table* exit = root.table("exit")) {
    TableReader reader(*exit, "[exit]");
    scenario.exit.y = reader.number("y", scenario.exit.y);
    scenario.exit.v0 = reader.opt_number("v0");
    scenario.exit.horizon = reader.number("horizon", scenario.exit.horizon);
    reader.finish();
    if (!(scenario.exit.horizon > 0.0)) throw ConfigError("exit.horizon must be positive");
  }

  if (const toml::Table* sweep = root.table("sweep")) {
    TableReader reader(*sweep, "[sweep]");
    scenario.sweep.count = reader.integer("count", scenario.sweep.count);
    scenario.sweep.min = reader.opt_number("min");
    scenario.sweep.max = reader.opt_number("max");
    scenario.sweep.horizon = reader.number("horizon", scenario.sweep.horizon);
    reader.finish();
    if (scenario.sweep.count < 1 || !(scenario.sweep.horizon > 0.0))
      throw ConfigError("[sweep]: invalid parameters");
  }

  if (const toml::Table* asym = root.table("asymptotics")) {
    TableReader reader(*asym, "[asymptotics]");
    scenario.asymptotics.boundary = reader.text("boundary", scenario.asymptotics.boundary);
    scenario.asymptotics.distances =
        reader.numbers("distances", scenario.asymptotics.distances);
    reader.finish();
    if (scenario.asymptotics.boundary != "upper" && scenario.asymptotics.boundary != "lower")
      throw ConfigError("asymptotics.boundary must be upper | lower");
    for (double d : scenario.asymptotics.distances)
      if (!(d >= 0.0)) throw ConfigError("asymptotics.distances must be >= 0");
  }

  root.finish();
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  toml::Table table;
  try {
    table = toml::parse_file(path);
  } catch (const toml::ParseError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_scenario(table, base.empty() ? "." : base);
}

ModelInstance instantiate(const Scenario& scenario) {
  ModelInstance inst;
  if (scenario.kind == "pendulum") {
    PendulumModel model;
    model.profile = build_profile(scenario.pendulum.profile);
    model.lambda = scenario.pendulum.lambda;
    if (scenario.level_override) model.level = *scenario.level_override;
    inst.system = model.system();
    inst.domain = model.domain();
    inst.initial_field = model.initial_field();
    inst.boundary = model.boundary_grid();
    inst.profile = model.profile;
  } else if (scenario.kind == "rod") {
    RotatingRodModel model = [&] {
      try {
        return RotatingRodModel::uniform(scenario.rod.omega, scenario.rod.half_length);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();
    inst.system = model.system();
    inst.domain = model.domain();
    if (scenario.level_override) {
      inst.domain.level = *scenario.level_override;
      const double b = std::sqrt(*scenario.level_override);
      Vec lo(1), hi(1);
      lo[0] = -b;
      hi[0] = b;
      inst.boundary = make_boundary_grid(inst.domain, {lo, hi});
    } else {
      inst.boundary = model.boundary_grid();
    }
    inst.initial_field = model.initial_field;
  } else {  // custom-1d
    const CustomSpec& c = scenario.custom;
    const double level = scenario.level_override.value_or(c.level);
    inst.domain = quadratic_domain(1, level);
    inst.system.dimension = 1;
    const double ks = c.accel_sin, kl = c.accel_lin, kc = c.accel_const;
    inst.system.rhs = [ks, kl, kc](double, const Vec& x, const Vec&) {
      Vec a(1);
      a[0] = ks * std::sin(x[0]) + kl * x[0] + kc;
      return a;
    };
    const double vq = c.v_quad, vl = c.v_lin, vc = c.v_const;
    inst.initial_field = [vq, vl, vc, level](const Vec& x) {
      Vec v(1);
      v[0] = vq * (level - x[0] * x[0]) + vl * x[0] + vc;
      return v;
    };
    const double b = std::sqrt(level);
    Vec lo(1), hi(1);
    lo[0] = -b;
    hi[0] = b;
    inst.boundary = make_boundary_grid(inst.domain, {lo, hi});
  }
  return inst;
}

VerificationResult run_verification(const Scenario& scenario, const ModelInstance& model) {
  VerificationResult result;

  // interior consistency samples: uniform grid strictly inside the interval
  const auto [lo, hi] = domain_endpoints_1d(model.domain);
  std::vector<Vec> interior;
  const int n = std::max(2, scenario.verify.interior_count);
  for (int i = 0; i < n; ++i) {
    Vec p(1);
    p[0] = lo + (hi - lo) * (i + 0.5) / n;
    interior.push_back(p);
  }
  result.consistency = validate_domain(model.domain, interior, model.boundary);

  if (model.profile) result.profile_report = model.profile->validate();

  std::vector<double> t_samples;
  const double t_end = model.profile && std::isfinite(model.profile->declared_end()) &&
                               !model.profile->is_periodic()
                           ? std::min(scenario.verify.t_max, model.profile->declared_end())
                           : scenario.verify.t_max;
  for (int i = 0; i < scenario.verify.t_count; ++i)
    t_samples.push_back(scenario.verify.t_count == 1
                            ? 0.0
                            : t_end * i / (scenario.verify.t_count - 1));

  result.inequality =
      check_boundary_inequality(model.domain, model.system, model.boundary, t_samples,
                                scenario.verify.xi_radius, scenario.verify.xi_samples);
  result.initial_field = check_initial_field(model.domain, model.initial_field, model.boundary);

  if (model.profile && model.profile->acceleration_bound()) {
    PendulumModel shim;
    shim.profile = *model.profile;
    shim.level = model.domain.level;
    result.bounded_drive_margin = shim.bounded_drive_margin();
  }

  result.pass = result.consistency.pass && result.inequality.pass &&
                result.initial_field.pass &&
                (!result.profile_report || result.profile_report->pass) &&
                (!result.bounded_drive_margin || *result.bounded_drive_margin > 0.0);
  return result;
}

}  // namespace neverfall
