#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "vph/cases.hpp"
#include "vph/mesh.hpp"
#include "vph/scheme.hpp"

namespace vph {

struct VGridSpec {
  double min = -6.0;
  double max = 6.0;
  int count = 201;
};

struct OutputSpec {
  std::vector<double> snapshot_times;
  VGridSpec v_grid;
};

struct SweepSpec {
  std::vector<double> lambdas;
  std::vector<double> alphas;
  double dt_max = 0.2;  // convergence sweeps use dt = min(dt_max, lambda / 50)
};

// Fully resolved experiment description; every number a run uses comes from
// here and is echoed into the metadata file.
struct ExperimentConfig {
  int schema_version = 1;
  CaseSpec case_spec;
  double dt = 0.0;
  double t_final = 0.0;
  int order = 2;
  int n_cells = 129;
  int max_mode = 32;
  SweepSpec sweep;
  OutputSpec output;
  bool reference_run = false;

  std::shared_ptr<const Mesh1D> make_mesh() const;
  SchemeConfig scheme_config(std::shared_ptr<const Mesh1D> mesh) const;
  nlohmann::ordered_json to_json() const;
};

// Parses and validates a config document. Unknown keys are rejected with
// their path; defaults (T0 = 1, order = 2, max_mode = 32, n_cells = 129,
// per-case domain and k_x) are filled in.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig config_from_json(const nlohmann::ordered_json& doc);

// Applies one "dotted.path=value" override onto a raw config document; the
// value is parsed as JSON when possible and as a string otherwise.
void apply_override(nlohmann::ordered_json& doc, const std::string& assignment);

std::vector<std::string> preset_names();
nlohmann::ordered_json preset_json(const std::string& name);
std::string preset_description(const std::string& name);

}  // namespace vph
