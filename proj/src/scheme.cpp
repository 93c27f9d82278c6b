#include "vph/scheme.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "vph/errors.hpp"
#include "vph/kernels.hpp"

namespace vph {

namespace {

inline int wrap(int j, int n) { return ((j % n) + n) % n; }

}  // namespace

void SchemeConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("scheme: dt must be positive");
  if (t_final < 0.0) throw ConfigError("scheme: t_final must be >= 0");
  if (order != 1 && order != 2) throw ConfigError("scheme: order must be 1 or 2");
  if (!(lambda > 0.0)) throw ConfigError("scheme: lambda must be positive");
  if (max_mode < 2) throw ConfigError("scheme: max_mode must be >= 2 (the k = 1 row couples C_2)");
  if (!(T0 > 0.0)) throw ConfigError("scheme: T0 must be positive");
  if (!mesh) throw ConfigError("scheme: mesh must be non-null");
  if (mesh->n_cells() % 2 == 0)
    throw ConfigError("scheme: even cell counts make the Poisson block singular (checkerboard)");
}

LinearStepOperator::LinearStepOperator(std::shared_ptr<const Mesh1D> mesh, double lambda,
                                       double T0, int max_mode, double sub_dt)
    : mesh_(std::move(mesh)), lambda_(lambda), T0_(T0), sub_dt_(sub_dt), max_mode_(max_mode) {
  if (!mesh_) throw ConfigError("linear operator: mesh must be non-null");
  if (!(sub_dt > 0.0)) throw ConfigError("linear operator: sub_dt must be positive");
  const int n = mesh_->n_cells();
  if (n % 2 == 0) throw ConfigError("linear operator: even cell counts are singular (checkerboard)");
  if (max_mode_ < 2) throw ConfigError("linear operator: max_mode must be >= 2");

  const int n_modes = max_mode_ + 1;
  const int phi0 = n_modes * n;   // first phi unknown
  const int mu = phi0 + n;        // multiplier
  const auto& hdx = mesh_->half_inv_dx();
  const double l2 = lambda_ * lambda_;
  const double inv_sqrt_T0 = 1.0 / std::sqrt(T0_);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(n) * (5 * n_modes + 8));
  auto idx_c = [n](int k, int j) { return k * n + j; };

  for (int k = 0; k < n_modes; ++k) {
    const double gm = sub_dt_ * std::sqrt(T0_ * k);        // d_h C_{k-1} factor
    const double gp = sub_dt_ * std::sqrt(T0_ * (k + 1));  // d_h C_{k+1} factor
    for (int j = 0; j < n; ++j) {
      const int row = idx_c(k, j);
      trips.emplace_back(row, idx_c(k, j), 1.0);
      if (k >= 1) {
        trips.emplace_back(row, idx_c(k - 1, wrap(j + 1, n)), gm * hdx[j]);
        trips.emplace_back(row, idx_c(k - 1, wrap(j - 1, n)), -gm * hdx[j]);
      }
      if (k < max_mode_) {
        trips.emplace_back(row, idx_c(k + 1, wrap(j + 1, n)), gp * hdx[j]);
        trips.emplace_back(row, idx_c(k + 1, wrap(j - 1, n)), -gp * hdx[j]);
      }
      if (k == 1) {
        // - (tau / sqrt(T0)) E = + (tau / sqrt(T0)) d_h phi
        trips.emplace_back(row, phi0 + wrap(j + 1, n), sub_dt_ * inv_sqrt_T0 * hdx[j]);
        trips.emplace_back(row, phi0 + wrap(j - 1, n), -sub_dt_ * inv_sqrt_T0 * hdx[j]);
      }
    }
  }
  // Poisson rows: -lambda^2 (d_h d_h phi)_j - C_0j + mu = -1.
  for (int j = 0; j < n; ++j) {
    const int row = phi0 + j;
    const double cj = hdx[j];
    trips.emplace_back(row, phi0 + wrap(j + 2, n), -l2 * cj * hdx[wrap(j + 1, n)]);
    trips.emplace_back(row, phi0 + j, l2 * cj * (hdx[wrap(j + 1, n)] + hdx[wrap(j - 1, n)]));
    trips.emplace_back(row, phi0 + wrap(j - 2, n), -l2 * cj * hdx[wrap(j - 1, n)]);
    trips.emplace_back(row, idx_c(0, j), -1.0);
    trips.emplace_back(row, mu, 1.0);
    trips.emplace_back(mu, phi0 + j, mesh_->widths()[j]);
  }

  mat_.resize(mu + 1, mu + 1);
  mat_.setFromTriplets(trips.begin(), trips.end());
  mat_.makeCompressed();
  lu_.compute(mat_);
  if (lu_.info() != Eigen::Success)
    throw SolverError("linear operator: factorization failed for " + cache_key());
}

std::string LinearStepOperator::cache_key() const {
  std::ostringstream os;
  os << "(sub_dt=" << sub_dt_ << ", lambda=" << lambda_ << ", T0=" << T0_
     << ", N_H=" << max_mode_ << ", N_x=" << mesh_->n_cells() << ", mesh@" << mesh_.get() << ")";
  return os.str();
}

LinearStepOperator::Solution LinearStepOperator::solve(const Eigen::MatrixXd& rhs_coeffs) const {
  const int n = mesh_->n_cells();
  const int n_modes = max_mode_ + 1;
  if (rhs_coeffs.rows() != n_modes || rhs_coeffs.cols() != n)
    throw ConfigError("linear operator: rhs shape does not match " + cache_key());

  const int phi0 = n_modes * n;
  Eigen::VectorXd b(phi0 + n + 1);
  for (int k = 0; k < n_modes; ++k)
    for (int j = 0; j < n; ++j) b[k * n + j] = rhs_coeffs(k, j);
  b.segment(phi0, n).setConstant(-1.0);
  b[phi0 + n] = 0.0;

  Eigen::VectorXd x = lu_.solve(b);
  if (lu_.info() != Eigen::Success)
    throw SolverError("linear operator: solve failed for " + cache_key());

  // Refine while the residual is visibly above round-off; poorly scaled
  // (sub_dt, lambda) combinations need it, well-scaled ones skip it.
  const double scale = b.cwiseAbs().maxCoeff() + 1.0;
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd r = b - mat_ * x;
    if (r.cwiseAbs().maxCoeff() <= 1e-14 * scale) break;
    x += lu_.solve(r);
  }

  Solution out;
  out.coeffs.resize(n_modes, n);
  for (int k = 0; k < n_modes; ++k)
    for (int j = 0; j < n; ++j) out.coeffs(k, j) = x[k * n + j];
  out.phi = x.segment(phi0, n);
  return out;
}

Eigen::MatrixXd nonlinear_step(Eigen::MatrixXd rhs_coeffs, const Eigen::VectorXd& e_field,
                               double tau, double T0) {
  const int n_modes = static_cast<int>(rhs_coeffs.rows());
  const int n_cells = static_cast<int>(rhs_coeffs.cols());
  if (e_field.size() != n_cells) throw ConfigError("nonlinear step: field length mismatch");
  std::vector<double> gain(n_modes);
  gain[0] = 0.0;
  for (int k = 1; k < n_modes; ++k) gain[k] = tau * std::sqrt(static_cast<double>(k) / T0);
  kernels::coupling_sweep(rhs_coeffs.data(), n_modes, n_cells, e_field.data(), gain.data());
  return rhs_coeffs;
}

Integrator::Integrator(SchemeConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  // Build the factorization up front: dt for the first-order scheme, the
  // shared gamma dt / 2 stage step for Strang.
  op(cfg_.order == 1 ? cfg_.dt : kSdirkGamma * cfg_.dt / 2.0);
}

const LinearStepOperator& Integrator::op(double sub_dt) {
  auto it = op_cache_.find(sub_dt);
  if (it == op_cache_.end()) {
    it = op_cache_
             .emplace(sub_dt, std::make_unique<LinearStepOperator>(
                                  cfg_.mesh, cfg_.lambda, cfg_.T0, cfg_.max_mode, sub_dt))
             .first;
  }
  return *it->second;
}

FieldSolution Integrator::field_of(const HermiteState& state) const {
  if (!poisson_) poisson_ = std::make_unique<PoissonSolver>(cfg_.mesh, cfg_.lambda);
  return poisson_->solve(state.coeffs.row(0).transpose());
}

Integrator::StepOutput Integrator::step(HermiteState& state) {
  if (state.basis.max_mode != cfg_.max_mode || state.basis.T0 != cfg_.T0 ||
      state.mesh->n_cells() != cfg_.mesh->n_cells())
    throw ConfigError("integrator: state does not match the scheme configuration");

  StepOutput out;
  if (cfg_.order == 1) {
    const auto& lin = op(cfg_.dt);
    auto sol = lin.solve(state.coeffs);
    Eigen::VectorXd e1 = field_from_potential(*cfg_.mesh, sol.phi);
    out.c2_step1 = sol.coeffs.row(2).transpose();
    out.has_c2_step1 = true;
    // E^{n+1} = E^{(1)} verbatim; no second Poisson solve.
    state.coeffs = nonlinear_step(std::move(sol.coeffs), e1, cfg_.dt, cfg_.T0);
    out.field = FieldSolution{std::move(sol.phi), std::move(e1), cfg_.lambda};
    return out;
  }

  const auto& lin = op(kSdirkGamma * cfg_.dt / 2.0);
  Eigen::VectorXd phi_last;
  auto linear_stage = [&](const Eigen::MatrixXd& rhs, double) {
    auto sol = lin.solve(rhs);
    phi_last = std::move(sol.phi);
    return std::move(sol.coeffs);
  };

  // First linear half-step; its final stage carries the field of the output.
  state.coeffs = sdirk2_substep(state.coeffs, cfg_.dt / 2.0, linear_stage);
  Eigen::VectorXd e_mid = field_from_potential(*cfg_.mesh, phi_last);

  // Nonlinear full step: B_0 vanishes, so C_0 and E are frozen across it.
  auto coupling_stage = [&](const Eigen::MatrixXd& rhs, double s) {
    return nonlinear_step(rhs, e_mid, s, cfg_.T0);
  };
  state.coeffs = sdirk2_substep(state.coeffs, cfg_.dt, coupling_stage);

  // Second linear half-step.
  state.coeffs = sdirk2_substep(state.coeffs, cfg_.dt / 2.0, linear_stage);
  Eigen::VectorXd e_end = field_from_potential(*cfg_.mesh, phi_last);
  out.field = FieldSolution{std::move(phi_last), std::move(e_end), cfg_.lambda};
  return out;
}

RunResult run(const SchemeConfig& cfg, HermiteState initial,
              const std::vector<StepObserver>& observers, RunOptions options) {
  cfg.validate();
  Integrator integ(cfg);

  auto notify = [&](long step, double t, const HermiteState& s, const FieldSolution& f,
                    const Eigen::VectorXd* c2) {
    for (size_t i = 0; i < observers.size(); ++i) {
      try {
        observers[i](StepContext{step, t, s, f, c2});
      } catch (const std::exception& e) {
        throw std::runtime_error("observer " + std::to_string(i) + " failed at step " +
                                 std::to_string(step) + ": " + e.what());
      }
    }
  };

  auto healthy = [&](const HermiteState& s, const FieldSolution& f) {
    return s.coeffs.allFinite() && f.E.allFinite() &&
           s.coeffs.cwiseAbs().maxCoeff() <= options.divergence_threshold &&
           f.E.cwiseAbs().maxCoeff() <= options.divergence_threshold;
  };

  const long n_steps = static_cast<long>(std::ceil(cfg.t_final / cfg.dt - 1e-9));
  FieldSolution field = integ.field_of(initial);
  notify(0, 0.0, initial, field, nullptr);

  RunResult result{std::move(initial), false, 0, 0.0};
  if (!healthy(result.state, field)) {
    result.diverged = true;
    return result;
  }
  for (long n = 1; n <= n_steps; ++n) {
    auto step_out = integ.step(result.state);
    const double t = static_cast<double>(n) * cfg.dt;
    if (!healthy(result.state, step_out.field)) {
      result.diverged = true;
      result.t_end = t;
      return result;
    }
    notify(n, t, result.state, step_out.field,
           step_out.has_c2_step1 ? &step_out.c2_step1 : nullptr);
    result.steps_taken = n;
    result.t_end = t;
  }
  return result;
}

}  // namespace vph
