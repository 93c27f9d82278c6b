#pragma once

#include <Eigen/Dense>
#include <deque>
#include <limits>
#include <span>
#include <vector>

#include "vph/field.hpp"
#include "vph/hermite.hpp"
#include "vph/scheme.hpp"

namespace vph {

// Quasineutral field surrogate sqrt(2) T0 d_h C_2.
Eigen::VectorXd e_slow(const HermiteState& state);

// Snapshot of the oscillatory initial data: (E - E_slow)(0) and C_1(0).
struct OscillationReference {
  Eigen::VectorXd e_minus_eslow0;
  Eigen::VectorXd c1_0;
  double lambda = 0.0;
  double T0 = 1.0;

  static OscillationReference capture(const HermiteState& state, const FieldSolution& field);
};

// Rotating-frame ansatz driven by the t = 0 snapshot:
//   E_osc  = cos(t/l) (E - E_slow)(0) - (sqrt(T0)/l) sin(t/l) C_1(0)
//   C1_osc = cos(t/l) C_1(0) + (l/sqrt(T0)) sin(t/l) (E - E_slow)(0)
struct OscillatoryParts {
  Eigen::VectorXd e_osc;
  Eigen::VectorXd c1_osc;
};

OscillatoryParts oscillatory_parts(const OscillationReference& ref, double t);

enum class ErrorMode {
  continuous,  // E0 = ||E - E_slow - E_osc||_l2, E1 = ||C_1 - C1_osc||_l2
  discrete     // E0 = ||E - sqrt(2) T0 d_h C_2||_l2, E1 = ||C_1||_h1
};

struct ErrorPair {
  double err0 = 0.0;
  double err1 = 0.0;
};

ErrorPair error_functionals(const HermiteState& state, const FieldSolution& field,
                            const OscillationReference& ref, double t, ErrorMode mode);

struct ConservationReport {
  double mass = 0.0;          // sum dx C_0
  double flux = 0.0;          // sum dx C_1
  double total_energy = 0.0;  // 1/2 sum dx (K + lambda^2 |E|^2)
};

ConservationReport conservation_report(const HermiteState& state, const FieldSolution& field,
                                       double lambda);

// l2 residual of the discrete harmonic-oscillator identity satisfied by the
// first-order scheme,
//   lambda^2 (d_h E^{n+1} - 2 d_h E^n + d_h E^{n-1}) / dt^2
//     + d_h(E^{n+1} C_0^{n+1})
//     - d_h^2(sqrt(2) T0 C_2^{(1,n+1)} + T0 C_0^{n+1})
//     - lambda^2 d_h(E^{n+1} d_h E^{n+1} - E^n d_h E^n),
// where C_2^{(1,n+1)} is the intermediate from the linear half of the split.
double reformulated_residual(const Mesh1D& mesh, const Eigen::VectorXd& e_prev2,
                             const Eigen::VectorXd& e_prev, const Eigen::VectorXd& e_curr,
                             const Eigen::VectorXd& c0_curr, const Eigen::VectorXd& c2_step1,
                             double dt, double lambda, double T0);

// Least squares fit of log(err) against log(lambda).
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

SlopeFit fit_slope(std::span<const double> lambdas, std::span<const double> errors);

// Period of the dominant spectral peak of the mean-detrended series. The
// series must be uniformly sampled and cover at least five periods.
double dominant_period(std::span<const double> t, std::span<const double> value);

// Per-step observables; one row of the diagnostics CSV.
struct DiagnosticsRecord {
  double t = 0.0;
  double potential_energy = 0.0;  // 1/2 sum dx |E|^2
  double mass = 0.0;
  double flux = 0.0;
  double total_energy = 0.0;
  double err0_cont = 0.0;
  double err1_cont = 0.0;
  double err0_disc = 0.0;
  double err1_disc = 0.0;
  double reformulated_residual = 0.0;  // NaN when not applicable
  double e_norm = 0.0;                 // ||E||_l2
  double e_slow_norm = 0.0;            // ||sqrt(2) T0 d_h C_2||_l2
};

// Recomputes the full record from (state, field, reference) alone.
DiagnosticsRecord make_record(const HermiteState& state, const FieldSolution& field,
                              const OscillationReference& ref, double t,
                              double residual = std::numeric_limits<double>::quiet_NaN());

// Trajectory observer assembling one record per step. Captures the
// oscillation reference at step 0 and, on first-order trajectories, maintains
// the field history window for the reformulated-Poisson residual.
class DiagnosticsCollector {
 public:
  explicit DiagnosticsCollector(double dt) : dt_(dt) {}

  void on_step(const StepContext& ctx);
  StepObserver observer();

  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  const OscillationReference& reference() const;
  bool has_reference() const { return has_ref_; }

  // True if total energy ever grows faster than 1% per unit time; the
  // implicit integrators dissipate, so growth is anomalous.
  bool energy_anomaly() const;

 private:
  double dt_;
  bool has_ref_ = false;
  OscillationReference ref_;
  std::deque<Eigen::VectorXd> e_window_;  // E^{n-1}, E^n
  std::vector<DiagnosticsRecord> records_;
};

}  // namespace vph
