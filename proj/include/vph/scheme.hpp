#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "vph/field.hpp"
#include "vph/hermite.hpp"
#include "vph/mesh.hpp"

namespace vph {

// Stage coefficient of the two-stage stiffly accurate SDIRK method.
inline constexpr double kSdirkGamma = 1.0 - std::numbers::sqrt2 / 2.0;

struct SchemeConfig {
  double dt = 0.0;
  double t_final = 0.0;
  int order = 2;  // 1 = Lie splitting with implicit Euler, 2 = Strang + SDIRK2
  double lambda = 0.0;
  int max_mode = 0;  // N_H
  double T0 = 1.0;
  std::shared_ptr<const Mesh1D> mesh;

  void validate() const;
};

// The implicit system of the linear split flow over one sub-step tau:
// per cell j and mode k,
//   k != 1:  C_k + tau (sqrt(k T0) d_h C_{k-1} + sqrt((k+1) T0) d_h C_{k+1}) = rhs_k
//   k == 1:  ... - (tau / sqrt(T0)) E = rhs_1 with E = -d_h phi
// coupled with the Poisson rows -lambda^2 d_h^2 phi - C_0 = -1 and the
// zero-mean row sum_j dx_j phi_j = 0 through one Lagrange multiplier.
// Unknown ordering: mode-major coefficient blocks (k outer, j inner), then the
// phi block, then the multiplier. The sparse LU factorization is computed once
// and reused for every solve.
class LinearStepOperator {
 public:
  LinearStepOperator(std::shared_ptr<const Mesh1D> mesh, double lambda, double T0, int max_mode,
                     double sub_dt);

  struct Solution {
    Eigen::MatrixXd coeffs;
    Eigen::VectorXd phi;
  };

  Solution solve(const Eigen::MatrixXd& rhs_coeffs) const;

  const Eigen::SparseMatrix<double>& matrix() const { return mat_; }
  double sub_dt() const { return sub_dt_; }
  // Identifies the factorization: (sub-step, lambda, T0, N_H, mesh).
  std::string cache_key() const;

 private:
  std::shared_ptr<const Mesh1D> mesh_;
  double lambda_, T0_, sub_dt_;
  int max_mode_;
  Eigen::SparseMatrix<double> mat_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

// The field-coupling split flow: one implicit Euler solve over tau with E
// frozen. Sequential in k per cell, no linear solve:
//   C_k = rhs_k + tau sqrt(k / T0) E (C_{k-1} - [k == 1]),  k = 1..N_H.
Eigen::MatrixXd nonlinear_step(Eigen::MatrixXd rhs_coeffs, const Eigen::VectorXd& e_field,
                               double tau, double T0);

// One SDIRK2 sub-step for dY/dt + F(Y) = 0 over tau. stage(rhs, s) must return
// the solution Y of Y + s F(Y) = rhs. Stiffly accurate: the returned state is
// the second stage itself.
template <class State, class Stage>
State sdirk2_substep(const State& y0, double tau, Stage&& stage) {
  const double gt = kSdirkGamma * tau;
  const State y1 = stage(y0, gt);
  // y0 - (1 - gamma) tau K1 with K1 = (y0 - y1) / (gamma tau)
  const double c = (1.0 - kSdirkGamma) / kSdirkGamma;
  const State rhs2 = y0 + c * (y1 - y0);
  return stage(rhs2, gt);
}

// Advances the Hermite-coefficient state by dt. Order 1 composes one implicit
// Euler solve of the linear flow with the sequential field-coupling update,
// reusing E from the linear solve. Order 2 is Strang: linear half-step,
// full nonlinear step, linear half-step, each integrated with SDIRK2; both
// half-steps share the factorization at gamma dt / 2.
class Integrator {
 public:
  explicit Integrator(SchemeConfig cfg);

  struct StepOutput {
    FieldSolution field;       // field at the end of the step
    Eigen::VectorXd c2_step1;  // intermediate C_2^(1) (first-order scheme only)
    bool has_c2_step1 = false;
  };

  StepOutput step(HermiteState& state);

  // Poisson solve on the current density; used for the t = 0 record.
  FieldSolution field_of(const HermiteState& state) const;

  const SchemeConfig& config() const { return cfg_; }

 private:
  const LinearStepOperator& op(double sub_dt);

  SchemeConfig cfg_;
  std::map<double, std::unique_ptr<LinearStepOperator>> op_cache_;
  mutable std::unique_ptr<PoissonSolver> poisson_;
};

struct StepContext {
  long step;  // 0 for the initial record
  double t;
  const HermiteState& state;
  const FieldSolution& field;
  const Eigen::VectorXd* c2_step1;  // null unless first-order scheme, step >= 1
};

using StepObserver = std::function<void(const StepContext&)>;

struct RunOptions {
  double divergence_threshold = 1e8;
};

struct RunResult {
  HermiteState state;
  bool diverged = false;
  long steps_taken = 0;
  double t_end = 0.0;
};

// Advances n = 0 .. ceil(t_final / dt), invoking every observer after each
// step (and once at n = 0). Deterministic given its inputs. If the state norm
// passes the divergence threshold the run stops and reports it as an outcome.
RunResult run(const SchemeConfig& cfg, HermiteState initial,
              const std::vector<StepObserver>& observers, RunOptions options = {});

}  // namespace vph
