#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vph/config.hpp"
#include "vph/errors.hpp"
#include "vph/runner.hpp"
#include "vph/version.hpp"

namespace {

// Exit codes by failure category.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

nlohmann::ordered_json load_document(const std::string& config_path, const std::string& preset,
                                     const std::vector<std::string>& overrides) {
  nlohmann::ordered_json doc;
  if (!preset.empty() && !config_path.empty())
    throw vph::ConfigError("give either --config or --preset, not both");
  if (!preset.empty()) {
    doc = vph::preset_json(preset);
  } else if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw vph::IoError("cannot open config file " + config_path);
    std::stringstream buf;
    buf << is.rdbuf();
    doc = nlohmann::ordered_json::parse(buf.str(), nullptr, true, true);
  } else {
    throw vph::ConfigError("one of --config or --preset is required");
  }
  for (const auto& ov : overrides) vph::apply_override(doc, ov);
  return doc;
}

void print_convergence(const vph::ConvergenceResult& result) {
  std::printf("%8s %10s %10s %14s %14s\n", "alpha", "lambda", "dt", "max_err0", "max_err1");
  for (const auto& r : result.rows)
    std::printf("%8g %10g %10g %14.6e %14.6e\n", r.alpha, r.lambda, r.dt, r.max_err0, r.max_err1);
  for (const auto& f : result.fits) {
    std::printf("alpha = %g: slope(err0) = %.3f (R^2 = %.4f), slope(err1) = %.3f (R^2 = %.4f)\n",
                f.alpha, f.err0.slope, f.err0.r_squared, f.err1.slope, f.err1.r_squared);
  }
}

void print_ap(const vph::ApResult& result) {
  std::printf("%10s %14s %14s %12s %12s %9s\n", "lambda", "sup_err0", "sup_err1", "err0/lambda",
              "err1/lambda", "diverged");
  for (const auto& r : result.rows)
    std::printf("%10g %14.6e %14.6e %12.4e %12.4e %9s\n", r.lambda, r.sup_err0, r.sup_err1,
                r.ratio0, r.ratio1, r.diverged ? "yes" : "no");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermite-moment Vlasov-Poisson simulator with an implicit, "
               "quasineutrality-robust time splitting"};
  app.set_version_flag("--version", vph::kVersion);
  app.require_subcommand(1);

  std::string config_path, preset, out_dir;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", config_path, "path to a JSON config file");
    cmd->add_option("--preset", preset, "name of a shipped preset (see list-presets)");
    cmd->add_option("--override", overrides, "key.path=value override, repeatable");
    if (needs_out) cmd->add_option("--out", out_dir, "output directory")->required();
  };

  auto* cmd_run = app.add_subcommand("run", "single trajectory with diagnostics output");
  add_common(cmd_run, true);
  auto* cmd_conv =
      app.add_subcommand("convergence", "lambda sweep of the oscillation-error maxima and slopes");
  add_common(cmd_conv, true);
  auto* cmd_ap = app.add_subcommand("ap-sweep", "fixed-dt lambda sweep of the discrete errors");
  add_common(cmd_ap, true);
  auto* cmd_list = app.add_subcommand("list-presets", "list shipped presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_list->parsed()) {
      for (const auto& name : vph::preset_names())
        std::printf("%-20s %s\n", name.c_str(), vph::preset_description(name).c_str());
      return kExitOk;
    }
    const auto doc = load_document(config_path, preset, overrides);
    const auto cfg = vph::config_from_json(doc);

    if (cmd_run->parsed()) {
      const auto outcome = vph::run_single(cfg, out_dir);
      std::printf("steps: %ld, t_end: %g%s\n", outcome.steps, outcome.t_end,
                  outcome.diverged ? " (diverged; recorded as outcome)" : "");
    } else if (cmd_conv->parsed()) {
      print_convergence(vph::run_convergence_sweep(cfg, out_dir));
    } else if (cmd_ap->parsed()) {
      print_ap(vph::run_ap_sweep(cfg, out_dir));
    }
    return kExitOk;
  } catch (const vph::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const vph::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const vph::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
}
