#include "vph/field.hpp"

#include <cmath>
#include <vector>

#include "vph/errors.hpp"

namespace vph {

namespace {

inline int wrap(int j, int n) { return ((j % n) + n) % n; }

}  // namespace

PoissonSolver::PoissonSolver(std::shared_ptr<const Mesh1D> mesh, double lambda)
    : mesh_(std::move(mesh)), lambda_(lambda) {
  if (!mesh_) throw ConfigError("poisson: mesh must be non-null");
  if (!(lambda > 0.0)) throw ConfigError("poisson: lambda must be positive");
  const int n = mesh_->n_cells();
  if (n % 2 == 0)
    throw ConfigError(
        "poisson: even cell counts put a checkerboard mode in the kernel of the "
        "centered stencil; use an odd N_x");

  const auto& hdx = mesh_->half_inv_dx();
  const double l2 = lambda_ * lambda_;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * n + 1);
  for (int j = 0; j < n; ++j) {
    // -lambda^2 (d_h d_h phi)_j + mu = rhs_j
    const double cj = hdx[j];
    trips.emplace_back(j, wrap(j + 2, n), -l2 * cj * hdx[wrap(j + 1, n)]);
    trips.emplace_back(j, j, l2 * cj * (hdx[wrap(j + 1, n)] + hdx[wrap(j - 1, n)]));
    trips.emplace_back(j, wrap(j - 2, n), -l2 * cj * hdx[wrap(j - 1, n)]);
    trips.emplace_back(j, n, 1.0);
    // zero-mean row
    trips.emplace_back(n, j, mesh_->widths()[j]);
  }
  op_.resize(n + 1, n + 1);
  op_.setFromTriplets(trips.begin(), trips.end());
  op_.makeCompressed();
  lu_.compute(op_);
  if (lu_.info() != Eigen::Success) throw SolverError("poisson: factorization failed");
}

FieldSolution PoissonSolver::solve(const Eigen::VectorXd& c0) const {
  const int n = mesh_->n_cells();
  if (c0.size() != n) throw ConfigError("poisson: density length does not match mesh");

  const double charge = mesh_->widths().dot((c0.array() - 1.0).matrix());
  if (std::abs(charge) > 1e-10 * std::max(1.0, mesh_->length()))
    throw SolverError("poisson: source is not neutral, total charge " + std::to_string(charge));

  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = c0.array() - 1.0;
  rhs[n] = 0.0;

  Eigen::VectorXd x = lu_.solve(rhs);
  // One refinement pass; cheap, and it keeps the residual at round-off even
  // for poorly scaled lambda.
  Eigen::VectorXd r = rhs - op_ * x;
  x += lu_.solve(r);

  FieldSolution out;
  out.lambda = lambda_;
  out.phi = x.head(n);
  out.E = field_from_potential(*mesh_, out.phi);
  return out;
}

Eigen::VectorXd field_from_potential(const Mesh1D& mesh, const Eigen::VectorXd& phi) {
  return -dh(mesh, phi);
}

}  // namespace vph
