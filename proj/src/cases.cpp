#include "vph/cases.hpp"

#include <cmath>
#include <functional>

#include "vph/errors.hpp"
#include "vph/kernels.hpp"

namespace vph {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

HermiteState project_case(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh, int max_mode,
                          int quad_order,
                          const std::function<double(double, double)>& profile) {
  HermiteBasisSpec basis{spec.T0, max_mode};
  if (quad_order <= 0) quad_order = basis.default_quadrature(false);
  if (quad_order < 2 * max_mode)
    throw ConfigError("cases: quadrature order below 2 max_mode risks aliasing");
  const GaussHermiteRule rule = gauss_hermite_rule(spec.T0, quad_order);
  const Eigen::MatrixXd poly = normalized_poly_matrix(rule.nodes, basis);

  HermiteState state(basis, std::move(mesh));
  const auto& x = state.mesh->centers();
  kernels::project_cells(profile, {x.data(), static_cast<size_t>(x.size())},
                         {rule.nodes.data(), static_cast<size_t>(rule.nodes.size())},
                         {rule.plain_weights.data(), static_cast<size_t>(rule.plain_weights.size())},
                         poly, state.coeffs);
  return state;
}

}  // namespace

CaseId case_id_from_string(const std::string& name) {
  if (name == "near_equilibrium") return CaseId::near_equilibrium;
  if (name == "temperature_perturbation") return CaseId::temperature_perturbation;
  if (name == "oscillatory_perturbation") return CaseId::oscillatory_perturbation;
  if (name == "two_stream") return CaseId::two_stream;
  throw ConfigError("cases: unknown case id '" + name + "'");
}

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::near_equilibrium: return "near_equilibrium";
    case CaseId::temperature_perturbation: return "temperature_perturbation";
    case CaseId::oscillatory_perturbation: return "oscillatory_perturbation";
    case CaseId::two_stream: return "two_stream";
  }
  throw ConfigError("cases: invalid case id");
}

void CaseSpec::apply_defaults() {
  if (a == b) {
    if (id == CaseId::two_stream) {
      a = -6.0;
      b = 6.0;
    } else {
      a = -10.0;
      b = 10.0;
    }
  }
  if (k_x == 0.0) k_x = id == CaseId::two_stream ? M_PI / 6.0 : M_PI / 10.0;
}

void CaseSpec::validate() const {
  if (delta < 0.0) throw ConfigError("cases: delta must be >= 0");
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("cases: alpha must lie in [0, 1]");
  if (!(b > a)) throw ConfigError("cases: domain must satisfy a < b");
  if (!(lambda > 0.0)) throw ConfigError("cases: lambda must be positive");
  if (!(T0 > 0.0)) throw ConfigError("cases: T0 must be positive");
  const double cycles = k_x * (b - a) / kTwoPi;
  if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, std::abs(cycles)))
    throw ConfigError("cases: k_x (b - a) must be an integer multiple of 2 pi (periodicity)");
  if (id != CaseId::near_equilibrium && delta >= 1.0)
    throw ConfigError("cases: T_in(x) = 1 + delta cos(k_x x) must stay positive");
}

double CaseSpec::temperature_at(double x) const { return 1.0 + delta * std::cos(k_x * x); }

HermiteState near_equilibrium(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh,
                              int max_mode) {
  if (spec.id != CaseId::near_equilibrium) throw ConfigError("cases: spec id mismatch");
  spec.validate();
  if (spec.T0 != 1.0)
    throw ConfigError("cases: near_equilibrium is formulated for T0 = 1");
  HermiteState state(HermiteBasisSpec{spec.T0, max_mode}, std::move(mesh));
  const double amp = spec.delta * std::pow(spec.lambda, 2.0 - spec.alpha);
  const auto& x = state.mesh->centers();
  for (int j = 0; j < state.mesh->n_cells(); ++j)
    state.coeffs(0, j) = 1.0 + amp * std::cos(spec.k_x * x[j]);
  return state;
}

HermiteState temperature_perturbation(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh,
                                      int max_mode, int quad_order) {
  if (spec.id != CaseId::temperature_perturbation) throw ConfigError("cases: spec id mismatch");
  spec.validate();
  auto profile = [&spec](double x, double v) {
    const double T = spec.temperature_at(x);
    return std::exp(-v * v / (2.0 * T)) / std::sqrt(2.0 * M_PI * T);
  };
  return project_case(spec, std::move(mesh), max_mode, quad_order, profile);
}

HermiteState oscillatory_perturbation(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh,
                                      int max_mode, int quad_order) {
  if (spec.id != CaseId::oscillatory_perturbation) throw ConfigError("cases: spec id mismatch");
  spec.validate();
  auto profile = [&spec](double x, double v) {
    const double T = spec.temperature_at(x);
    const double mod = 1.0 + spec.delta * std::cos(spec.k_x * x) * std::sin(3.0 * M_PI * v);
    return mod * std::exp(-v * v / (2.0 * T)) / std::sqrt(2.0 * M_PI * T);
  };
  return project_case(spec, std::move(mesh), max_mode, quad_order, profile);
}

HermiteState two_stream(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh, int max_mode,
                        int quad_order) {
  if (spec.id != CaseId::two_stream) throw ConfigError("cases: spec id mismatch");
  spec.validate();
  auto profile = [&spec](double x, double v) {
    const double T = spec.temperature_at(x);
    // The 1/6 prefactor normalizes 1 + 5 <v^2> / T = 6 to unit density.
    return (1.0 + 5.0 * v * v / T) * std::exp(-v * v / (2.0 * T)) /
           (6.0 * std::sqrt(2.0 * M_PI * T));
  };
  return project_case(spec, std::move(mesh), max_mode, quad_order, profile);
}

int case_quadrature_order(const CaseSpec& spec, int max_mode) {
  if (spec.id == CaseId::near_equilibrium) return 0;
  return HermiteBasisSpec{spec.T0, max_mode}.default_quadrature(false);
}

HermiteState make_initial_state(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh,
                                int max_mode, int quad_order) {
  switch (spec.id) {
    case CaseId::near_equilibrium: return near_equilibrium(spec, std::move(mesh), max_mode);
    case CaseId::temperature_perturbation:
      return temperature_perturbation(spec, std::move(mesh), max_mode, quad_order);
    case CaseId::oscillatory_perturbation:
      return oscillatory_perturbation(spec, std::move(mesh), max_mode, quad_order);
    case CaseId::two_stream: return two_stream(spec, std::move(mesh), max_mode, quad_order);
  }
  throw ConfigError("cases: invalid case id");
}

}  // namespace vph
