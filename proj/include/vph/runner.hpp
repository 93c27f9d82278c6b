#pragma once

#include <filesystem>
#include <vector>

#include "vph/config.hpp"
#include "vph/diagnostics.hpp"

namespace vph {

struct RunOutcome {
  bool diverged = false;
  double t_end = 0.0;
  long steps = 0;
  std::vector<DiagnosticsRecord> records;
};

// Single trajectory. Writes diagnostics.csv (one row per step, fixed column
// order), optional plain-text snapshots of f(x, v) with axis files, and
// metadata.json echoing the fully resolved configuration. Identical configs
// produce byte-identical outputs.
RunOutcome run_single(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct ConvergenceRow {
  double alpha = 0.0;
  double lambda = 0.0;
  double dt = 0.0;
  double max_err0 = 0.0;
  double max_err1 = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  // One fit per alpha and functional, in alpha order.
  struct Fit {
    double alpha = 0.0;
    SlopeFit err0;
    SlopeFit err1;
  };
  std::vector<Fit> fits;
};

// Lambda sweep of the oscillation-error maxima with dt = min(dt_max, lambda/50)
// per point; fits log-log slopes per alpha. Sweep points are independent and
// run concurrently.
ConvergenceResult run_convergence_sweep(const ExperimentConfig& cfg,
                                        const std::filesystem::path& out_dir);

struct ApRow {
  double lambda = 0.0;
  double sup_err0 = 0.0;  // over n >= 1, discrete mode
  double sup_err1 = 0.0;  // over n >= 2, discrete mode
  double ratio0 = 0.0;    // sup_err0 / lambda
  double ratio1 = 0.0;
  bool diverged = false;
};

struct ApResult {
  std::vector<ApRow> rows;
};

// Fixed-dt lambda sweep of the discrete-mode error functionals. Divergence is
// recorded per row as an outcome, not an error.
ApResult run_ap_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace vph
