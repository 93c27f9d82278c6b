#include "vph/hermite.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "vph/errors.hpp"
#include "vph/kernels.hpp"

namespace vph {

namespace {
// The extreme node sits at v^2 / (2 T0) ~ 2 Q + 1. Beyond 368 the Maxwellian
// underflows to exact zero there and the plain weights turn into 0/0.
// Up to that point an overflowing Christoffel sum cleanly zeroes the weight.
constexpr int kMaxQuadratureOrder = 368;
}  // namespace

void HermiteBasisSpec::validate() const {
  if (!(T0 > 0.0)) throw ConfigError("hermite: T0 must be positive");
  if (max_mode < 2) throw ConfigError("hermite: max_mode must be >= 2 (the scheme couples C_2)");
}

int HermiteBasisSpec::default_quadrature(bool analytic_profile) const {
  const int floor = analytic_profile ? 128 : 256;
  return std::max(2 * max_mode + 8, floor);
}

double maxwellian(double v, double T0) {
  return std::exp(-v * v / (2.0 * T0)) / std::sqrt(2.0 * M_PI * T0);
}

Eigen::VectorXd eval_basis(double v, const HermiteBasisSpec& spec) {
  spec.validate();
  if (!std::isfinite(v)) throw ConfigError("eval_basis: velocity sample must be finite");
  Eigen::VectorXd psi(spec.max_mode + 1);
  kernels::ref::basis_matrix({&v, 1}, spec.T0, spec.max_mode, psi.data());
  return psi;
}

GaussHermiteRule gauss_hermite_rule(double T0, int order) {
  if (!(T0 > 0.0)) throw ConfigError("quadrature: T0 must be positive");
  if (order < 2) throw ConfigError("quadrature: order must be >= 2");
  if (order > kMaxQuadratureOrder)
    throw ConfigError("quadrature: order above " + std::to_string(kMaxQuadratureOrder) +
                      " underflows the Gaussian node weights");

  // Golub-Welsch nodes: eigenvalues of the Jacobi matrix of the orthonormal
  // polynomials for the measure M(v) dv (zero diagonal, off-diagonal
  // sqrt(T0 k)). Weights come from the Christoffel function rather than the
  // eigenvector first components, which lose all relative accuracy at the
  // extreme nodes.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(T0 * k);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("quadrature: eigen decomposition failed");

  GaussHermiteRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(order);
  rule.plain_weights.resize(order);
  for (int i = 0; i < order; ++i) {
    const double v = rule.nodes[i];
    // 1 / sum_{k < order} P_k(v)^2 with P_k the orthonormal polynomials
    double pm = 0.0, pk = 1.0, sum = 1.0;
    for (int k = 0; k + 1 < order; ++k) {
      const double pn = (v * pk - std::sqrt(T0 * k) * pm) / std::sqrt(T0 * (k + 1));
      sum += pn * pn;
      pm = pk;
      pk = pn;
    }
    rule.weights[i] = 1.0 / sum;
    rule.plain_weights[i] = rule.weights[i] / maxwellian(v, T0);
  }
  if (!rule.plain_weights.allFinite())
    throw SolverError("quadrature: weight underflow at order " + std::to_string(order));
  return rule;
}

Eigen::MatrixXd normalized_poly_matrix(const Eigen::VectorXd& nodes, const HermiteBasisSpec& spec) {
  const int k_max = spec.max_mode;
  Eigen::MatrixXd poly(k_max + 1, nodes.size());
  const double sqrt_T0 = std::sqrt(spec.T0);
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    const double v = nodes[i];
    poly(0, i) = 1.0;
    if (k_max >= 1) poly(1, i) = v / sqrt_T0;
    for (int k = 1; k < k_max; ++k)
      poly(k + 1, i) =
          (v * poly(k, i) - std::sqrt(spec.T0 * k) * poly(k - 1, i)) / std::sqrt(spec.T0 * (k + 1));
  }
  return poly;
}

Eigen::VectorXd project(const std::function<double(double)>& profile, const HermiteBasisSpec& spec,
                        int quad_order) {
  spec.validate();
  if (quad_order < 2 * spec.max_mode)
    throw ConfigError("project: quadrature order below 2 max_mode risks aliasing");
  const GaussHermiteRule rule = gauss_hermite_rule(spec.T0, quad_order);
  const Eigen::MatrixXd poly = normalized_poly_matrix(rule.nodes, spec);

  Eigen::VectorXd fw(quad_order);
  for (int i = 0; i < quad_order; ++i) fw[i] = rule.plain_weights[i] * profile(rule.nodes[i]);
  return poly * fw;
}

HermiteState::HermiteState(HermiteBasisSpec basis_spec, std::shared_ptr<const Mesh1D> mesh_ptr)
    : basis(basis_spec), mesh(std::move(mesh_ptr)) {
  basis.validate();
  if (!mesh) throw ConfigError("state: mesh must be non-null");
  coeffs = Eigen::MatrixXd::Zero(basis.max_mode + 1, mesh->n_cells());
}

HermiteState HermiteState::steady(HermiteBasisSpec basis_spec,
                                  std::shared_ptr<const Mesh1D> mesh_ptr) {
  HermiteState s(basis_spec, std::move(mesh_ptr));
  s.coeffs.row(0).setOnes();
  return s;
}

Eigen::MatrixXd reconstruct(const HermiteState& state, const Eigen::VectorXd& v_grid) {
  if (!state.all_finite()) throw ConfigError("reconstruct: state has non-finite entries");
  Eigen::MatrixXd basis(state.n_modes(), v_grid.size());
  kernels::basis_matrix({v_grid.data(), static_cast<size_t>(v_grid.size())}, state.basis.T0,
                        state.basis.max_mode, basis.data());
  return state.coeffs.transpose() * basis;
}

double reconstruct_at(const HermiteState& state, int cell, double v) {
  return state.coeffs.col(cell).dot(eval_basis(v, state.basis));
}

Moments moments(const HermiteState& state) {
  state.basis.validate();
  Moments m;
  m.density = state.coeffs.row(0).transpose();
  m.current = std::sqrt(state.basis.T0) * state.coeffs.row(1).transpose();
  m.kinetic_energy =
      state.basis.T0 * (std::sqrt(2.0) * state.coeffs.row(2) + state.coeffs.row(0)).transpose();
  return m;
}

}  // namespace vph
