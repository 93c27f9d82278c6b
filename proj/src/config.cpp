#include "vph/config.hpp"

#include <cmath>
#include <map>
#include <set>

#include "vph/errors.hpp"

namespace vph {

namespace {

using nlohmann::ordered_json;

void check_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key))
      throw ConfigError("config: unknown key '" + (path.empty() ? key : path + "." + key) + "'");
  }
}

double require_number(const ordered_json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError("config: missing required key '" + path + "'");
  if (!obj[key].is_number()) throw ConfigError("config: '" + path + "' must be a number");
  return obj[key].get<double>();
}

double number_or(const ordered_json& obj, const std::string& key, double fallback,
                 const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("config: '" + path + "' must be a number");
  return obj[key].get<double>();
}

int int_or(const ordered_json& obj, const std::string& key, int fallback,
           const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ConfigError("config: '" + path + "' must be an integer");
  return obj[key].get<int>();
}

std::vector<double> number_list(const ordered_json& obj, const std::string& key,
                                const std::string& path) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  if (!obj[key].is_array()) throw ConfigError("config: '" + path + "' must be an array");
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw ConfigError("config: '" + path + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

const std::map<std::string, std::pair<std::string, std::string>>& preset_table() {
  // name -> (description, config document). Desk-scale counterparts of the
  // published runs; resolutions are reduced and documented in the README.
  static const std::map<std::string, std::pair<std::string, std::string>> table = {
      {"fig10",
       {"near-equilibrium run (alpha = 0, lambda = 0.1); potential energy oscillates with "
        "period pi lambda",
        R"({
  "schema_version": 1,
  "case": {"id": "near_equilibrium", "delta": 0.1, "alpha": 0.0},
  "lambda": 0.1,
  "scheme": {"dt": 0.002, "t_final": 10.0, "order": 2},
  "grid": {"n_cells": 129, "max_mode": 32}
})"}},
      {"fig10-convergence",
       {"near-equilibrium lambda sweep (alpha = 0): rates 1 and 2 for the oscillation errors",
        R"({
  "schema_version": 1,
  "case": {"id": "near_equilibrium", "delta": 0.1, "alpha": 0.0},
  "lambda": 0.1,
  "scheme": {"dt": 0.002, "t_final": 2.0, "order": 2},
  "grid": {"n_cells": 513, "max_mode": 64},
  "sweep": {"lambdas": [0.32, 0.18, 0.1, 0.056, 0.032], "alphas": [0.0], "dt_max": 0.2}
})"}},
      {"fig11-convergence",
       {"near-equilibrium lambda sweep (alpha = 0.5): rates 0.5 and 1.5",
        R"({
  "schema_version": 1,
  "case": {"id": "near_equilibrium", "delta": 0.1, "alpha": 0.5},
  "lambda": 0.1,
  "scheme": {"dt": 0.002, "t_final": 2.0, "order": 2},
  "grid": {"n_cells": 513, "max_mode": 64},
  "sweep": {"lambdas": [0.32, 0.18, 0.1, 0.056, 0.032], "alphas": [0.5], "dt_max": 0.2}
})"}},
      {"fig12-convergence",
       {"near-equilibrium lambda sweep at the critical exponent alpha = 1 (reported only)",
        R"({
  "schema_version": 1,
  "case": {"id": "near_equilibrium", "delta": 0.1, "alpha": 1.0},
  "lambda": 0.1,
  "scheme": {"dt": 0.002, "t_final": 2.0, "order": 2},
  "grid": {"n_cells": 513, "max_mode": 64},
  "sweep": {"lambdas": [0.32, 0.18, 0.1, 0.056, 0.032], "alphas": [1.0], "dt_max": 0.2}
})"}},
      {"fig13-ap",
       {"asymptotic-preserving sweep: alpha = 1, first order, dt = 0.2 fixed, lambda down to 1e-4",
        R"({
  "schema_version": 1,
  "case": {"id": "near_equilibrium", "delta": 0.1, "alpha": 1.0},
  "lambda": 0.01,
  "scheme": {"dt": 0.2, "t_final": 10.0, "order": 1},
  "grid": {"n_cells": 65, "max_mode": 64},
  "sweep": {"lambdas": [1.0, 0.01, 0.001, 0.0001]}
})"}},
      {"fig13-blowup",
       {"alpha = 1 with lambda = 0.1 at dt = 0.2: the second-order run leaves the stability "
        "region; divergence is recorded as an outcome",
        R"({
  "schema_version": 1,
  "case": {"id": "near_equilibrium", "delta": 0.1, "alpha": 1.0},
  "lambda": 0.1,
  "scheme": {"dt": 0.2, "t_final": 10.0, "order": 2},
  "grid": {"n_cells": 65, "max_mode": 128}
})"}},
      {"fig20",
       {"temperature-perturbed Maxwellian (lambda = 1): slow damping of the field norms",
        R"({
  "schema_version": 1,
  "case": {"id": "temperature_perturbation", "delta": 0.1},
  "lambda": 1.0,
  "scheme": {"dt": 0.2, "t_final": 30.0, "order": 2},
  "grid": {"n_cells": 101, "max_mode": 128}
})"}},
      {"fig30",
       {"velocity-oscillatory perturbation (lambda = 0.1): echo in the field norms near t = 25",
        R"({
  "schema_version": 1,
  "case": {"id": "oscillatory_perturbation", "delta": 0.05},
  "lambda": 0.1,
  "scheme": {"dt": 0.1, "t_final": 30.0, "order": 2},
  "grid": {"n_cells": 101, "max_mode": 180}
})"}},
      {"fig40",
       {"two-stream instability (lambda = 0.1): exponential growth of the field norm",
        R"({
  "schema_version": 1,
  "case": {"id": "two_stream", "delta": 0.01},
  "lambda": 0.1,
  "scheme": {"dt": 0.01, "t_final": 10.0, "order": 2},
  "grid": {"n_cells": 129, "max_mode": 128},
  "output": {"snapshot_times": [0.0, 6.0, 8.0], "v_grid": {"min": -6.0, "max": 6.0, "count": 201}}
})"}},
  };
  return table;
}

}  // namespace

std::shared_ptr<const Mesh1D> ExperimentConfig::make_mesh() const {
  return Mesh1D::make_uniform_shared(case_spec.a, case_spec.b, n_cells);
}

SchemeConfig ExperimentConfig::scheme_config(std::shared_ptr<const Mesh1D> mesh) const {
  SchemeConfig sc;
  sc.dt = dt;
  sc.t_final = t_final;
  sc.order = order;
  sc.lambda = case_spec.lambda;
  sc.max_mode = max_mode;
  sc.T0 = case_spec.T0;
  sc.mesh = std::move(mesh);
  return sc;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  ordered_json doc;
  doc["schema_version"] = schema_version;
  doc["case"] = {{"id", to_string(case_spec.id)},
                 {"delta", case_spec.delta},
                 {"alpha", case_spec.alpha},
                 {"k_x", case_spec.k_x},
                 {"domain", {case_spec.a, case_spec.b}}};
  doc["lambda"] = case_spec.lambda;
  doc["T0"] = case_spec.T0;
  doc["scheme"] = {{"dt", dt}, {"t_final", t_final}, {"order", order}};
  doc["grid"] = {{"n_cells", n_cells}, {"max_mode", max_mode}};
  doc["sweep"] = {{"lambdas", sweep.lambdas}, {"alphas", sweep.alphas}, {"dt_max", sweep.dt_max}};
  doc["output"] = {{"snapshot_times", output.snapshot_times},
                   {"v_grid",
                    {{"min", output.v_grid.min},
                     {"max", output.v_grid.max},
                     {"count", output.v_grid.count}}}};
  doc["reference_run"] = reference_run;
  return doc;
}

ExperimentConfig config_from_json(const ordered_json& doc) {
  if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
  check_keys(doc, {"schema_version", "case", "lambda", "T0", "scheme", "grid", "sweep", "output",
                   "reference_run"},
             "");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != 1)
    throw ConfigError("config: schema_version must be present and equal to 1");

  ExperimentConfig cfg;

  if (!doc.contains("case") || !doc["case"].is_object())
    throw ConfigError("config: missing 'case' object");
  const auto& jcase = doc["case"];
  check_keys(jcase, {"id", "delta", "alpha", "k_x", "domain"}, "case");
  if (!jcase.contains("id") || !jcase["id"].is_string())
    throw ConfigError("config: 'case.id' must be a string");
  cfg.case_spec.id = case_id_from_string(jcase["id"].get<std::string>());
  cfg.case_spec.delta = number_or(jcase, "delta", 0.1, "case.delta");
  cfg.case_spec.alpha = number_or(jcase, "alpha", 0.0, "case.alpha");
  cfg.case_spec.k_x = number_or(jcase, "k_x", 0.0, "case.k_x");
  if (jcase.contains("domain")) {
    const auto dom = number_list(jcase, "domain", "case.domain");
    if (dom.size() != 2) throw ConfigError("config: 'case.domain' must be [a, b]");
    cfg.case_spec.a = dom[0];
    cfg.case_spec.b = dom[1];
  }

  cfg.case_spec.lambda = require_number(doc, "lambda", "lambda");
  cfg.case_spec.T0 = number_or(doc, "T0", 1.0, "T0");

  if (!doc.contains("scheme") || !doc["scheme"].is_object())
    throw ConfigError("config: missing 'scheme' object");
  const auto& jscheme = doc["scheme"];
  check_keys(jscheme, {"dt", "t_final", "order"}, "scheme");
  cfg.dt = require_number(jscheme, "dt", "scheme.dt");
  cfg.t_final = require_number(jscheme, "t_final", "scheme.t_final");
  cfg.order = int_or(jscheme, "order", 2, "scheme.order");

  if (doc.contains("grid")) {
    const auto& jgrid = doc["grid"];
    if (!jgrid.is_object()) throw ConfigError("config: 'grid' must be an object");
    check_keys(jgrid, {"n_cells", "max_mode"}, "grid");
    cfg.n_cells = int_or(jgrid, "n_cells", 129, "grid.n_cells");
    cfg.max_mode = int_or(jgrid, "max_mode", 32, "grid.max_mode");
  }

  if (doc.contains("sweep")) {
    const auto& jsweep = doc["sweep"];
    if (!jsweep.is_object()) throw ConfigError("config: 'sweep' must be an object");
    check_keys(jsweep, {"lambdas", "alphas", "dt_max"}, "sweep");
    cfg.sweep.lambdas = number_list(jsweep, "lambdas", "sweep.lambdas");
    cfg.sweep.alphas = number_list(jsweep, "alphas", "sweep.alphas");
    cfg.sweep.dt_max = number_or(jsweep, "dt_max", 0.2, "sweep.dt_max");
  }

  if (doc.contains("output")) {
    const auto& jout = doc["output"];
    if (!jout.is_object()) throw ConfigError("config: 'output' must be an object");
    check_keys(jout, {"snapshot_times", "v_grid"}, "output");
    cfg.output.snapshot_times = number_list(jout, "snapshot_times", "output.snapshot_times");
    if (jout.contains("v_grid")) {
      const auto& jv = jout["v_grid"];
      check_keys(jv, {"min", "max", "count"}, "output.v_grid");
      cfg.output.v_grid.min = number_or(jv, "min", -6.0, "output.v_grid.min");
      cfg.output.v_grid.max = number_or(jv, "max", 6.0, "output.v_grid.max");
      cfg.output.v_grid.count = int_or(jv, "count", 201, "output.v_grid.count");
    }
  }

  if (doc.contains("reference_run")) {
    if (!doc["reference_run"].is_boolean())
      throw ConfigError("config: 'reference_run' must be a boolean");
    cfg.reference_run = doc["reference_run"].get<bool>();
  }

  // Resolve defaults, then validate everything the run will use.
  cfg.case_spec.apply_defaults();
  cfg.case_spec.validate();
  if (cfg.n_cells % 2 == 0)
    throw ConfigError(
        "config: grid.n_cells must be odd; the centered stencil on an even periodic grid has a "
        "checkerboard kernel mode and the Poisson block becomes singular");
  if (cfg.n_cells < 3) throw ConfigError("config: grid.n_cells must be >= 3");
  if (cfg.max_mode < 2) throw ConfigError("config: grid.max_mode must be >= 2");
  if (!(cfg.dt > 0.0)) throw ConfigError("config: scheme.dt must be positive");
  if (cfg.t_final < 0.0) throw ConfigError("config: scheme.t_final must be >= 0");
  if (cfg.order != 1 && cfg.order != 2) throw ConfigError("config: scheme.order must be 1 or 2");
  for (double l : cfg.sweep.lambdas)
    if (!(l > 0.0)) throw ConfigError("config: sweep.lambdas must be positive");
  for (double a : cfg.sweep.alphas)
    if (a < 0.0 || a > 1.0) throw ConfigError("config: sweep.alphas must lie in [0, 1]");
  if (!(cfg.sweep.dt_max > 0.0)) throw ConfigError("config: sweep.dt_max must be positive");
  if (cfg.output.v_grid.count < 2 || !(cfg.output.v_grid.max > cfg.output.v_grid.min))
    throw ConfigError("config: output.v_grid must have count >= 2 and min < max");
  for (double t : cfg.output.snapshot_times)
    if (t < 0.0) throw ConfigError("config: output.snapshot_times must be >= 0");
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return config_from_json(doc);
}

void apply_override(ordered_json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("config: override must look like key.path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  ordered_json value;
  try {
    value = ordered_json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;  // plain string, e.g. case.id=two_stream
  }

  ordered_json* node = &doc;
  size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError("config: empty key in override path '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null())
      throw ConfigError("config: override path '" + path + "' crosses a non-object value");
    start = dot + 1;
  }
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : preset_table()) names.push_back(name);
  return names;
}

nlohmann::ordered_json preset_json(const std::string& name) {
  const auto& table = preset_table();
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("config: unknown preset '" + name + "'");
  return ordered_json::parse(it->second.second);
}

std::string preset_description(const std::string& name) {
  const auto& table = preset_table();
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("config: unknown preset '" + name + "'");
  return it->second.first;
}

}  // namespace vph
