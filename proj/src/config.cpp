#include "ouu/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ouu/errors.hpp"

namespace ouu::cfg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at '" + path + "': " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
  }
}

double get_finite(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing");
  if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
  const double v = obj[key].get<double>();
  if (!std::isfinite(v)) fail(path + "." + key, "must be finite");
  return v;
}

double get_finite_or(const json& obj, const std::string& path, const std::string& key,
                     double fallback) {
  return obj.contains(key) ? get_finite(obj, path, key) : fallback;
}

int get_int(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing");
  if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
  return obj[key].get<int>();
}

int get_int_or(const json& obj, const std::string& path, const std::string& key, int fallback) {
  return obj.contains(key) ? get_int(obj, path, key) : fallback;
}

Interval parse_interval(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(path, "expected [lo, hi]");
  Interval iv{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(iv.a) || !std::isfinite(iv.b)) fail(path, "must be finite");
  if (!(iv.a < iv.b)) fail(path, "interval is empty");
  return iv;
}

std::vector<double> parse_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(path, "expected an array of numbers");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    out.push_back(x);
  }
  return out;
}

ScalarField parse_field(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind")) fail(path, "expected a coefficient object with 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") {
    check_keys(j, path, {"kind", "value"});
    return ScalarField::constant(get_finite(j, path, "value"));
  }
  if (kind == "piecewise") {
    check_keys(j, path, {"kind", "breakpoints", "values"});
    if (!j.contains("breakpoints") || !j.contains("values")) fail(path, "missing pieces");
    try {
      return ScalarField::piecewise(parse_number_list(j["breakpoints"], path + ".breakpoints"),
                                    parse_number_list(j["values"], path + ".values"));
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  if (kind == "sine" || kind == "cosine") {
    check_keys(j, path, {"kind", "amplitude", "omega", "phase"});
    const double a = get_finite(j, path, "amplitude");
    const double w = get_finite(j, path, "omega");
    const double p = get_finite_or(j, path, "phase", 0.0);
    return kind == "sine" ? ScalarField::sine(a, w, p) : ScalarField::cosine(a, w, p);
  }
  fail(path + ".kind", "unknown coefficient kind '" + kind + "'");
}

InstanceConfig parse_instance(const json& j, const std::string& path) {
  check_keys(j, path,
             {"domain", "state_elements", "control_elements", "pde", "field", "qoi", "theta_reg",
              "mode", "box", "initial"});
  InstanceConfig inst;
  if (j.contains("domain")) inst.domain = parse_interval(j["domain"], path + ".domain");
  inst.state_elements = get_int_or(j, path, "state_elements", 64);
  inst.control_elements = get_int_or(j, path, "control_elements", inst.state_elements);
  if (inst.state_elements < 1) fail(path + ".state_elements", "must be positive");
  if (inst.control_elements < 1) fail(path + ".control_elements", "must be positive");

  if (j.contains("pde")) {
    const json& p = j["pde"];
    check_keys(p, path + ".pde", {"c1", "c2", "s_e"});
    if (p.contains("c1")) {
      inst.pde.c1 = parse_field(p["c1"], path + ".pde.c1");
      if (!inst.pde.c1.is_piecewise_constant())
        fail(path + ".pde.c1", "must be constant or piecewise constant");
    }
    if (p.contains("c2")) {
      const auto v = parse_number_list(p["c2"], path + ".pde.c2");
      if (v.size() != 2) fail(path + ".pde.c2", "expected two endpoint values");
      if (v[0] < 0.0 || v[1] < 0.0) fail(path + ".pde.c2", "must be nonnegative");
      inst.pde.c2 = {v[0], v[1]};
    }
    if (p.contains("s_e")) {
      const auto v = parse_number_list(p["s_e"], path + ".pde.s_e");
      if (v.size() != 2) fail(path + ".pde.s_e", "expected two endpoint values");
      inst.pde.s_e = {v[0], v[1]};
    }
  }

  {
    auto spec = std::make_shared<FieldSpec>();
    spec->domain = inst.domain;
    if (j.contains("field")) {
      const json& f = j["field"];
      check_keys(f, path + ".field", {"b0", "modes", "bound_grid_cells"});
      if (f.contains("b0")) spec->b0 = parse_field(f["b0"], path + ".field.b0");
      if (f.contains("modes")) {
        if (!f["modes"].is_array()) fail(path + ".field.modes", "expected an array");
        int k = 0;
        for (const auto& m : f["modes"])
          spec->modes.push_back(
              parse_field(m, path + ".field.modes[" + std::to_string(k++) + "]"));
      }
      // Fallback bound grid: 10x the state resolution unless overridden.
      spec->bound_grid_cells =
          get_int_or(f, path + ".field", "bound_grid_cells", 10 * inst.state_elements);
      if (spec->bound_grid_cells < 2) fail(path + ".field.bound_grid_cells", "too small");
    }
    inst.field = std::move(spec);
  }

  if (j.contains("qoi")) {
    const json& q = j["qoi"];
    check_keys(q, path + ".qoi", {"s_d", "target_window", "s_t", "alpha"});
    if (q.contains("s_d")) inst.qoi.s_d = parse_field(q["s_d"], path + ".qoi.s_d");
    if (q.contains("target_window"))
      inst.qoi.target_window = parse_interval(q["target_window"], path + ".qoi.target_window");
    inst.qoi.s_t = get_finite_or(q, path + ".qoi", "s_t", 0.0);
    inst.qoi.alpha = get_finite_or(q, path + ".qoi", "alpha", 0.9);
    if (!(inst.qoi.alpha > 0.0 && inst.qoi.alpha < 1.0))
      fail(path + ".qoi.alpha", "must lie in (0, 1)");
    if (!(inst.qoi.target_window.a >= inst.domain.a - 1e-12 &&
          inst.qoi.target_window.b <= inst.domain.b + 1e-12))
      fail(path + ".qoi.target_window", "must lie inside the domain");
  } else {
    inst.qoi.target_window = inst.domain;
  }

  inst.theta_reg = get_finite_or(j, path, "theta_reg", 0.0);
  if (inst.theta_reg < 0.0) fail(path + ".theta_reg", "must be nonnegative");

  if (j.contains("mode")) {
    const std::string m = j["mode"].get<std::string>();
    if (m == "expectation")
      inst.mode = saa::ObjectiveMode::Expectation;
    else if (m == "buffered")
      inst.mode = saa::ObjectiveMode::Buffered;
    else
      fail(path + ".mode", "expected 'expectation' or 'buffered'");
  }

  if (j.contains("box")) {
    const auto v = parse_number_list(j["box"], path + ".box");
    if (v.size() != 2 || !(v[0] <= v[1])) fail(path + ".box", "expected [lower, upper]");
    inst.box = {v[0], v[1]};
  }

  inst.z0.assign(static_cast<size_t>(inst.control_elements), 0.0);
  if (j.contains("initial")) {
    const json& i = j["initial"];
    check_keys(i, path + ".initial", {"z", "gamma", "sigma"});
    if (i.contains("z")) {
      if (i["z"].is_number()) {
        inst.z0.assign(static_cast<size_t>(inst.control_elements), i["z"].get<double>());
      } else {
        inst.z0 = parse_number_list(i["z"], path + ".initial.z");
        if (static_cast<int>(inst.z0.size()) != inst.control_elements)
          fail(path + ".initial.z", "length must equal control_elements");
      }
    }
    inst.gamma0 = get_finite_or(i, path + ".initial", "gamma", 0.0);
    inst.sigma0 = get_finite_or(i, path + ".initial", "sigma", 0.0);
    if (inst.sigma0 < 0.0) fail(path + ".initial.sigma", "must be nonnegative");
  }
  return inst;
}

opt::Schedule parse_schedule(const json& j, const std::string& path) {
  check_keys(j, path, {"stages", "multiplier_rule", "y_max"});
  opt::Schedule s;
  if (!j.contains("stages") || !j["stages"].is_array() || j["stages"].empty())
    fail(path + ".stages", "expected a nonempty array");
  int k = 0;
  for (const auto& st : j["stages"]) {
    const std::string sp = path + ".stages[" + std::to_string(k++) + "]";
    check_keys(st, sp, {"nu", "beta", "theta_pen", "delta", "max_inner_iters"});
    opt::StageParams p;
    p.nu = get_int(st, sp, "nu");
    p.beta = get_finite_or(st, sp, "beta", 0.05);
    p.theta_pen = get_finite_or(st, sp, "theta_pen", 1.0);
    p.delta = get_finite_or(st, sp, "delta", 1e-6);
    p.max_inner_iters = get_int_or(st, sp, "max_inner_iters", 500);
    s.stages.push_back(p);
  }
  if (j.contains("multiplier_rule")) {
    const std::string m = j["multiplier_rule"].get<std::string>();
    if (m == "fixed-zero")
      s.multiplier_rule = opt::MultiplierRule::FixedZero;
    else if (m == "augmented-lagrangian-update")
      s.multiplier_rule = opt::MultiplierRule::AugmentedLagrangian;
    else
      fail(path + ".multiplier_rule", "expected 'fixed-zero' or 'augmented-lagrangian-update'");
  }
  s.y_max = get_finite_or(j, path, "y_max", 1e6);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return s;
}

VerifyParams parse_verify(const json& j, const std::string& path) {
  check_keys(j, path,
             {"rate_levels", "rate_min", "decay_levels", "decay_samples", "decay_min_order",
              "smax_bound_factor", "superquantile_laws", "superquantile_tol", "duality_laws",
              "duality_alpha_points", "probe_n_mc", "probe_se_factor"});
  VerifyParams v;
  auto levels = [&](const char* key, std::vector<int>& out) {
    if (!j.contains(key)) return;
    out.clear();
    for (const auto& e : j[key]) {
      if (!e.is_number_integer() || e.get<int>() < 1) fail(path + "." + key, "bad level");
      out.push_back(e.get<int>());
    }
    if (out.size() < 3) fail(path + "." + key, "need at least three levels");
  };
  levels("rate_levels", v.rate_levels);
  levels("decay_levels", v.decay_levels);
  v.rate_min = get_finite_or(j, path, "rate_min", v.rate_min);
  v.decay_samples = get_int_or(j, path, "decay_samples", v.decay_samples);
  v.decay_min_order = get_finite_or(j, path, "decay_min_order", v.decay_min_order);
  v.smax_bound_factor = get_finite_or(j, path, "smax_bound_factor", v.smax_bound_factor);
  v.superquantile_laws = get_int_or(j, path, "superquantile_laws", v.superquantile_laws);
  v.superquantile_tol = get_finite_or(j, path, "superquantile_tol", v.superquantile_tol);
  v.duality_laws = get_int_or(j, path, "duality_laws", v.duality_laws);
  v.duality_alpha_points = get_int_or(j, path, "duality_alpha_points", v.duality_alpha_points);
  v.probe_n_mc = get_int_or(j, path, "probe_n_mc", v.probe_n_mc);
  v.probe_se_factor = get_finite_or(j, path, "probe_se_factor", v.probe_se_factor);
  return v;
}

EpiDemoParams parse_epi(const json& j, const std::string& path) {
  check_keys(j, path, {"epsilon", "stages", "seeds"});
  EpiDemoParams e;
  e.epsilon = get_finite_or(j, path, "epsilon", e.epsilon);
  if (!(e.epsilon > 0.0)) fail(path + ".epsilon", "must be positive");
  if (j.contains("stages")) {
    e.stages.clear();
    int k = 0;
    for (const auto& st : j["stages"]) {
      const std::string sp = path + ".stages[" + std::to_string(k++) + "]";
      check_keys(st, sp, {"nu", "delta"});
      e.stages.emplace_back(get_int(st, sp, "nu"), get_finite(st, sp, "delta"));
    }
    if (e.stages.empty()) fail(path + ".stages", "expected a nonempty array");
  }
  if (j.contains("seeds")) {
    e.seeds.clear();
    for (const auto& s : j["seeds"]) {
      if (!s.is_number_unsigned() && !s.is_number_integer()) fail(path + ".seeds", "bad seed");
      e.seeds.push_back(s.get<std::uint64_t>());
    }
    if (e.seeds.empty()) fail(path + ".seeds", "expected a nonempty array");
  }
  return e;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

saa::ControlPoint InstanceConfig::start() const {
  saa::ControlPoint cp;
  cp.z = z0;
  cp.gamma = gamma0;
  cp.sigma = sigma0;
  cp.box = box;
  return cp;
}

const InstanceConfig& ExperimentConfig::require_instance() const {
  if (!instance) throw ConfigError("config is missing the 'instance' section");
  return *instance;
}

const opt::Schedule& ExperimentConfig::require_schedule() const {
  if (!schedule) throw ConfigError("config is missing the 'schedule' section");
  return *schedule;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "$",
             {"instance", "schedule", "seed", "threads", "output_dir", "feasibility_tolerance",
              "nu_ref", "verify", "sample_field", "epi_demo"});
  ExperimentConfig c;
  if (j.contains("instance")) c.instance = parse_instance(j["instance"], "$.instance");
  if (j.contains("schedule")) c.schedule = parse_schedule(j["schedule"], "$.schedule");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned())
      fail("$.seed", "expected an integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.threads = get_int_or(j, "$", "threads", 1);
  if (c.threads < 1) fail("$.threads", "must be positive");
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  c.feasibility_tolerance = get_finite_or(j, "$", "feasibility_tolerance", 1e-3);
  c.nu_ref = get_int_or(j, "$", "nu_ref", 10000);
  if (c.nu_ref < 1) fail("$.nu_ref", "must be positive");
  if (j.contains("verify")) c.verify = parse_verify(j["verify"], "$.verify");
  if (j.contains("epi_demo")) c.epi = parse_epi(j["epi_demo"], "$.epi_demo");
  if (j.contains("sample_field")) {
    const json& s = j["sample_field"];
    check_keys(s, "$.sample_field", {"count", "grid_points"});
    c.sample_field.count = get_int_or(s, "$.sample_field", "count", 5);
    c.sample_field.grid_points = get_int_or(s, "$.sample_field", "grid_points", 201);
    if (c.sample_field.count < 1) fail("$.sample_field.count", "must be positive");
    if (c.sample_field.grid_points < 2) fail("$.sample_field.grid_points", "too few points");
  }
  c.config_hash = fnv1a(j.dump());
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ouu::cfg
