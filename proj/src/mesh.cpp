#include "vph/mesh.hpp"

#include <cmath>

#include "vph/errors.hpp"
#include "vph/kernels.hpp"

namespace vph {

Mesh1D::Mesh1D(double a, double b, Eigen::VectorXd widths)
    : a_(a), b_(b), widths_(std::move(widths)) {
  const auto n = widths_.size();
  if (!(a < b)) throw ConfigError("mesh: requires a < b");
  if (n < 3) throw ConfigError("mesh: requires at least 3 cells");
  if ((widths_.array() <= 0.0).any()) throw ConfigError("mesh: cell widths must be positive");
  const double total = widths_.sum();
  if (std::abs(total - (b - a)) > 1e-12 * (b - a))
    throw ConfigError("mesh: cell widths must sum to b - a");

  centers_.resize(n);
  half_inv_dx_.resize(n);
  double left = a;
  for (Eigen::Index j = 0; j < n; ++j) {
    centers_[j] = left + 0.5 * widths_[j];
    half_inv_dx_[j] = 1.0 / (2.0 * widths_[j]);
    left += widths_[j];
  }
  uniform_ = (widths_.maxCoeff() - widths_.minCoeff()) <= 1e-14 * widths_.maxCoeff();
}

Mesh1D Mesh1D::make_uniform(double a, double b, int n_cells) {
  if (n_cells < 3) throw ConfigError("mesh: requires at least 3 cells");
  const double dx = (b - a) / n_cells;
  Eigen::VectorXd widths = Eigen::VectorXd::Constant(n_cells, dx);
  Mesh1D mesh(a, b, std::move(widths));
  // Exact uniform centers, immune to the accumulation in the generic ctor.
  for (int j = 0; j < n_cells; ++j) mesh.centers_[j] = a + (j + 0.5) * dx;
  mesh.uniform_ = true;
  return mesh;
}

std::shared_ptr<const Mesh1D> Mesh1D::make_uniform_shared(double a, double b, int n_cells) {
  return std::make_shared<const Mesh1D>(make_uniform(a, b, n_cells));
}

double Mesh1D::regularity_ratio() const { return widths_.maxCoeff() / widths_.minCoeff(); }

Eigen::VectorXd dh(const Mesh1D& mesh, const Eigen::VectorXd& u) {
  if (u.size() != mesh.n_cells()) throw ConfigError("dh: field length does not match mesh");
  Eigen::VectorXd out(u.size());
  kernels::central_diff({u.data(), static_cast<size_t>(u.size())},
                        {mesh.half_inv_dx().data(), static_cast<size_t>(u.size())},
                        {out.data(), static_cast<size_t>(out.size())});
  return out;
}

double cell_integral(const Mesh1D& mesh, const Eigen::VectorXd& u) {
  if (u.size() != mesh.n_cells()) throw ConfigError("cell_integral: field length does not match mesh");
  return mesh.widths().dot(u);
}

double l2_norm(const Mesh1D& mesh, const Eigen::VectorXd& u) {
  if (u.size() != mesh.n_cells()) throw ConfigError("l2_norm: field length does not match mesh");
  return std::sqrt(mesh.widths().dot(u.cwiseAbs2()));
}

double hr_norm(const Mesh1D& mesh, const Eigen::VectorXd& u, int order) {
  if (order < 0) throw ConfigError("hr_norm: order must be >= 0");
  double acc = 0.0;
  Eigen::VectorXd cur = u;
  for (int s = 0; s <= order; ++s) {
    acc += mesh.widths().dot(cur.cwiseAbs2());
    if (s < order) cur = dh(mesh, cur);
  }
  return std::sqrt(acc);
}

NormPair norms(const Mesh1D& mesh, const Eigen::VectorXd& u, int order) {
  return {l2_norm(mesh, u), hr_norm(mesh, u, order)};
}

}  // namespace vph
