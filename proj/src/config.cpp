#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "nlsflow/error.hpp"
#include "nlsflow/experiments.hpp"
#include "nlsflow/scattering.hpp"

namespace nlsflow {

using json = nlohmann::ordered_json;

namespace {

const std::vector<ExperimentInfo> kCatalog{
    {"conservation", {"AC-1"}, "mass and energy drift of every model over t in [0, 10]"},
    {"splitting-order", {"AC-2"}, "Richardson ratio of the Strang step under dt halving"},
    {"cazenave-haraux", {"AC-3"}, "logarithmic nonlinearity inequality on random complex pairs"},
    {"ode-suite", {"AC-4", "AC-5"}, "envelope first integrals, asymptotes and the tau difference bound"},
    {"local-continuity", {"AC-6"}, "finite-time L2 continuity in the power, fitted exponent"},
    {"global-interaction-picture", {"AC-7"}, "interaction-picture differences to t = 1024 in the <t> lens frame"},
    {"scattering-continuity", {"AC-7"}, "extraction of asymptotic states, long-range negative control"},
    {"uniform-w1", {"AC-8"}, "sup over dyadic t of W1 between lens densities as nu -> sigma"},
    {"pseudo-energy", {"AC-9"}, "weighted pseudo-energy decay and uniform bounds, every step"},
    {"log-limit-local", {"AC-10"}, "rescaled to logarithmic flow on [0, T], exponential envelope fit"},
    {"gaussian-profile", {"AC-11"}, "W1 distance of the logarithmic lens density to the Gaussian"},
    {"sobolev-growth", {"AC-11"}, "||u_0||_{H^1}^2 / ln t over the last decade"},
    {"log-limit-global", {"AC-12"}, "sup over dyadic t of W1(rho_sigma, rho_0) along sigma -> 0"},
    {"metrics-suite", {"AC-13"}, "Wasserstein axioms, closed forms and the negative Sobolev bound"},
};

TimeSpec uniform(double dt, double t0, double t_max) {
  TimeSpec t;
  t.dt = dt;
  t.schedule = "uniform";
  t.t0 = t0;
  t.t_max = t_max;
  return t;
}

// Lens runs: dt grows with t up to 1.
TimeSpec geometric(double t0, double ratio, double t_max) {
  TimeSpec t;
  t.dt = 1e-3;
  t.dt_growth = 1e-3;
  t.dt_max = 1.0;
  t.schedule = "geometric";
  t.t0 = t0;
  t.ratio = ratio;
  t.t_max = t_max;
  return t;
}

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; }))
      fail("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(where + "." + key + ": " + e.what());
  }
}

void read_list(const json& obj, const char* key, std::vector<double>& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (v.is_number()) {
    out = {v.get<double>()};
    return;
  }
  if (!v.is_array()) fail(where + "." + key + " must be a number or a list of numbers");
  out.clear();
  for (const auto& x : v) {
    if (!x.is_number()) fail(where + "." + key + " must hold numbers");
    out.push_back(x.get<double>());
  }
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() { return kCatalog; }

const ExperimentInfo& experiment_info(std::string_view name) {
  for (const auto& e : kCatalog)
    if (e.name == name) return e;
  fail("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig default_config(std::string_view experiment) {
  ExperimentConfig c;
  c.experiment = experiment_info(experiment).name;
  c.output = "runs/" + c.experiment;
  auto& p = c.params;
  if (c.experiment == "conservation") {
    c.time = uniform(1e-3, 0.5, 10.0);
    c.sigma = {0.5};
  } else if (c.experiment == "splitting-order") {
    c.grid = {1, 512, 12.0};
    c.time = uniform(0.04, 1.0, 1.0);
    c.sigma = {0.5};
  } else if (c.experiment == "cazenave-haraux") {
    c.samples = 1000000;
    c.params["log10_modulus"] = {-6.0, 3.0};
    c.params["near_fraction"] = {0.5};
  } else if (c.experiment == "ode-suite") {
    c.time = uniform(1e-3, 1.0, 1e6);
    c.sigma = {0.1, 0.01, 0.001};
    p["first_integral_sigma"] = {0.0, 0.01, 0.1, 0.5, 1.0, 2.0};
    p["asymptote_sigma"] = {0.5, 1.0, 2.0};
    p["bound_t_max"] = {1e4};
  } else if (c.experiment == "local-continuity") {
    c.time = uniform(1e-3, 0.1, 2.0);
    c.sigma = {0.8, 0.3};
    c.nu_offsets = {-0.04, -0.02, -0.01, 0.01, 0.02, 0.04};
  } else if (c.experiment == "global-interaction-picture") {
    c.grid = {1, 256, 12.0};
    c.time = geometric(1.0, 2.0, 1024.0);
    c.sigma = {1.5};
    c.nu_offsets = {-0.01, -0.02, -0.04};
    c.datum.amplitude = 0.0;
  } else if (c.experiment == "scattering-continuity") {
    c.grid = {1, 2048, 200.0};
    c.time = uniform(2e-3, 1.0, 32.0);
    c.time.schedule = "geometric";
    c.sigma = {1.5};
    c.nu_offsets = {-0.01, -0.02, -0.04};
    c.datum.amplitude = 0.0;
    p["negative_control_sigma"] = {0.8};
  } else if (c.experiment == "uniform-w1") {
    c.time = geometric(1.0, 2.0, 1000.0);
    c.sigma = {0.8};
    c.nu_offsets = {-0.04, -0.02, 0.02, 0.04};
  } else if (c.experiment == "pseudo-energy") {
    c.time = geometric(1.0, 10.0, 1000.0);
    c.sigma = {0.02, 0.05, 0.1};
  } else if (c.experiment == "log-limit-local") {
    c.time = uniform(1e-3, 0.25, 4.0);
    c.sigma = {0.01, 0.02, 0.05};
    c.datum.width_shift = 1.0;
    p["horizons"] = {1.0, 2.0, 4.0};
  } else if (c.experiment == "gaussian-profile") {
    c.time = geometric(10.0, 10.0, 1e4);
    c.sigma = {0.0};
    p["limit_scale"] = {2.0};
  } else if (c.experiment == "sobolev-growth") {
    c.time = geometric(10.0, std::pow(10.0, 0.25), 1e4);
    c.sigma = {0.0};
  } else if (c.experiment == "log-limit-global") {
    c.time = geometric(1.0, 2.0, 1000.0);
    c.sigma = {0.1, 0.05, 0.02, 0.01};
    c.datum.width_shift = 1.0;
  } else if (c.experiment == "metrics-suite") {
    c.grid = {1, 512, 10.0};
    c.samples = 100;
  }
  return c;
}

std::vector<double> schedule_times(const TimeSpec& time) {
  std::vector<double> out;
  const double stop = time.t_max * (1.0 + 1e-12);
  if (time.schedule == "uniform") {
    for (long j = 1;; ++j) {
      const double t = time.t0 * static_cast<double>(j);
      if (t > stop) break;
      out.push_back(t);
    }
  } else {
    for (int j = 0;; ++j) {
      const double t = time.t0 * std::pow(time.ratio, j);
      if (t > stop) break;
      out.push_back(t);
    }
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  const auto& info = experiment_info(c.experiment);
  const auto& name = info.name;
  if (c.grid.dim != 1 && !(c.grid.dim == 2 && (name == "conservation" || name == "splitting-order")))
    fail(name + " runs in one dimension");
  if (c.grid.points < 16 || c.grid.points % 2 != 0) fail("grid.points must be even and at least 16");
  if (!finite_positive(c.grid.half_length)) fail("grid.half_length must be positive");
  const auto& t = c.time;
  if (!finite_positive(t.dt)) fail("time.dt must be positive");
  if (t.dt_growth < 0.0 || (t.dt_growth > 0.0 && !(t.dt_max >= t.dt))) fail("time.dt_growth needs dt_max >= dt");
  if (t.schedule != "uniform" && t.schedule != "geometric") fail("time.schedule must be uniform or geometric");
  if (!finite_positive(t.t0) || !(t.t_max >= t.t0)) fail("time needs 0 < t0 <= t_max");
  if (t.schedule == "geometric" && !(t.ratio > 1.0)) fail("time.ratio must exceed 1");
  if (!(c.log_floor > 0.0)) fail("log_floor must be positive");
  const bool uses_sigma = name != "cazenave-haraux" && name != "metrics-suite";
  if (c.sigma.size() > 8 || (uses_sigma && c.sigma.empty())) fail("sigma must list 1 to 8 values");
  if (c.nu_offsets.size() > 8) fail("nu_offsets holds at most 8 values");
  if (!finite_positive(c.datum.width) || !(c.datum.amplitude >= 0.0)) fail("datum needs width > 0, amplitude >= 0");

  const auto defaults = default_config(name);
  for (const auto& [key, _] : c.params)
    if (!defaults.params.contains(key)) fail("unknown params key '" + key + "' for " + name);
  for (const auto& [key, _] : defaults.params)
    if (!c.params.contains(key) || c.params.at(key).empty()) fail("params." + key + " is required for " + name);

  const double d = c.grid.dim;
  const auto all_sigma = [&](auto pred) { return std::all_of(c.sigma.begin(), c.sigma.end(), pred); };
  const auto all_nu = [&](auto pred) {
    for (double s : c.sigma)
      for (double o : c.nu_offsets)
        if (!pred(s + o)) return false;
    return true;
  };
  const auto positive = [](double s) { return std::isfinite(s) && s > 0.0; };
  const auto below_one_over_d = [&](double s) { return s > 0.0 && d * s < 1.0; };

  if (name == "conservation" || name == "splitting-order" || name == "local-continuity" || name == "uniform-w1") {
    if (!all_sigma(positive) || !all_nu(positive)) fail(name + " needs sigma > 0 and sigma + offset > 0");
  } else if (name == "global-interaction-picture" || name == "scattering-continuity") {
    const double s0 = strauss_exponent(c.grid.dim);
    const auto above = [&](double s) { return std::isfinite(s) && s > s0; };
    if (!all_sigma(above) || !all_nu(above))
      fail(name + " needs every sigma and nu above the Strauss exponent " + format_number(s0));
    if (c.nu_offsets.empty()) fail(name + " needs nu_offsets");
  } else if (name == "pseudo-energy" || name == "log-limit-local" || name == "log-limit-global" || name == "ode-suite") {
    if (!all_sigma(below_one_over_d)) fail(name + " needs 0 < sigma < 1/d");
  } else if (name == "gaussian-profile" || name == "sobolev-growth") {
    if (c.sigma != std::vector<double>{0.0}) fail(name + " runs the logarithmic equation: sigma must be [0]");
  }
  if ((name == "local-continuity" || name == "uniform-w1") && c.nu_offsets.size() < 2)
    fail(name + " needs at least two nu offsets");
  if ((name == "cazenave-haraux" || name == "metrics-suite") && c.samples < 1) fail(name + " needs samples >= 1");
  if (name == "log-limit-local") {
    for (double h : c.params.at("horizons"))
      if (!(h > 0.0 && h <= t.t_max)) fail("log-limit-local horizons must lie in (0, t_max]");
    if (c.params.at("horizons").size() < 2) fail("log-limit-local needs at least two horizons");
  }
  if (name == "ode-suite") {
    for (double s : c.params.at("first_integral_sigma"))
      if (!(s >= 0.0)) fail("first_integral_sigma must be >= 0");
    for (double s : c.params.at("asymptote_sigma"))
      if (!(s > 0.0)) fail("asymptote_sigma must be > 0");
  }
  if (name == "scattering-continuity") {
    const double s = c.params.at("negative_control_sigma").front();
    if (!(s > 0.0 && d * s <= 1.0)) fail("the negative control needs a long-range power 0 < sigma <= 1/d");
  }
  if (name == "uniform-w1" || name == "log-limit-global") {
    if (t.schedule != "geometric" || t.ratio != 2.0) fail(name + " takes its sup over the dyadic grid (ratio 2)");
  }
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json config_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["units"] = c.units;
  j["grid"] = {{"dim", c.grid.dim}, {"points", c.grid.points}, {"half_length", c.grid.half_length}};
  j["time"] = {{"dt", c.time.dt},         {"dt_growth", c.time.dt_growth}, {"dt_max", c.time.dt_max},
               {"schedule", c.time.schedule}, {"t0", c.time.t0},             {"ratio", c.time.ratio},
               {"t_max", c.time.t_max}};
  j["sigma"] = c.sigma;
  j["nu_offsets"] = c.nu_offsets;
  j["datum"] = {{"shape", "gaussian"},
                {"width", c.datum.width},
                {"amplitude", c.datum.amplitude},
                {"width_shift", c.datum.width_shift}};
  j["log_floor"] = c.log_floor;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  json params = json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  j["params"] = params;
  j["output"] = c.output;
  return j;
}

ExperimentConfig config_from(const json& j) {
  check_keys(j, {"experiment", "units", "grid", "time", "sigma", "nu_offsets", "datum", "log_floor", "seed", "samples",
                 "params", "output"},
             "config");
  if (!j.contains("experiment") || !j.at("experiment").is_string()) fail("config.experiment is required");
  auto c = default_config(j.at("experiment").get<std::string>());
  read(j, "units", c.units, "config");
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    check_keys(g, {"dim", "points", "half_length"}, "grid");
    read(g, "dim", c.grid.dim, "grid");
    read(g, "points", c.grid.points, "grid");
    read(g, "half_length", c.grid.half_length, "grid");
  }
  if (j.contains("time")) {
    const auto& t = j.at("time");
    check_keys(t, {"dt", "dt_growth", "dt_max", "schedule", "t0", "ratio", "t_max"}, "time");
    read(t, "dt", c.time.dt, "time");
    read(t, "dt_growth", c.time.dt_growth, "time");
    read(t, "dt_max", c.time.dt_max, "time");
    read(t, "schedule", c.time.schedule, "time");
    read(t, "t0", c.time.t0, "time");
    read(t, "ratio", c.time.ratio, "time");
    read(t, "t_max", c.time.t_max, "time");
  }
  read_list(j, "sigma", c.sigma, "config");
  read_list(j, "nu_offsets", c.nu_offsets, "config");
  if (j.contains("datum")) {
    const auto& d = j.at("datum");
    check_keys(d, {"shape", "width", "amplitude", "width_shift"}, "datum");
    if (d.contains("shape") && d.at("shape") != "gaussian") fail("datum.shape must be gaussian");
    read(d, "width", c.datum.width, "datum");
    read(d, "amplitude", c.datum.amplitude, "datum");
    read(d, "width_shift", c.datum.width_shift, "datum");
  }
  read(j, "log_floor", c.log_floor, "config");
  read(j, "seed", c.seed, "config");
  read(j, "samples", c.samples, "config");
  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (!p.is_object()) fail("params must be an object");
    for (const auto& [key, _] : p.items()) {
      if (!c.params.contains(key)) fail("unknown params key '" + key + "' for " + c.experiment);
      read_list(p, key.c_str(), c.params[key], "params");
    }
  }
  read(j, "output", c.output, "config");
  validate(c);
  return c;
}

// JSON has no NaN or infinity; those are stored as null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
double number_from(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

json verdict_json(const Verdict& v) {
  return {{"id", v.id}, {"check", v.check}, {"value", number(v.value)}, {"threshold", number(v.threshold)},
          {"pass", v.pass}};
}

}  // namespace

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("not a JSON document: ") + e.what());
  }
  return config_from(j);
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2) + "\n"; }

// The output directory is where a run lands, not what it computes.
std::string config_hash(const ExperimentConfig& config) {
  auto j = config_json(config);
  j.erase("output");
  return fnv1a_hex(j.dump());
}

bool RunRecord::all_pass() const {
  return status == "complete" && !verdicts.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string record_to_json(const RunRecord& r) {
  json j;
  j["status"] = r.status;
  j["config_hash"] = r.config_hash;
  j["code_version"] = r.code_version;
  j["started"] = r.started;
  j["finished"] = r.finished;
  j["config"] = config_json(r.config);
  j["artifacts"] = r.artifacts;
  j["artifact_hashes"] = r.artifact_hashes;
  j["timings"] = r.timings;
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(verdict_json(v));
  j["verdicts"] = verdicts;
  if (!r.failed_stage.empty() || !r.error.empty()) j["failure"] = {{"stage", r.failed_stage}, {"message", r.error}};
  return j.dump(2) + "\n";
}

RunRecord record_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("run record is not JSON: ") + e.what());
  }
  RunRecord r;
  try {
    r.status = j.at("status").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.code_version = j.at("code_version").get<std::string>();
    r.started = j.at("started").get<std::string>();
    r.finished = j.at("finished").get<std::string>();
    r.config = config_from(j.at("config"));
    r.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    r.artifact_hashes = j.at("artifact_hashes").get<std::map<std::string, std::string>>();
    r.timings = j.at("timings").get<Timings>();
    for (const auto& v : j.at("verdicts"))
      r.verdicts.push_back({v.at("id").get<std::string>(), v.at("check").get<std::string>(),
                            number_from(v.at("value")), number_from(v.at("threshold")), v.at("pass").get<bool>()});
    if (j.contains("failure")) {
      r.failed_stage = j.at("failure").at("stage").get<std::string>();
      r.error = j.at("failure").at("message").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed run record: ") + e.what());
  }
  return r;
}

}  // namespace nlsflow
