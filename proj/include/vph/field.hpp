#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>

#include "vph/mesh.hpp"

namespace vph {

// Discrete potential and field tied to a Debye parameter lambda. phi has zero
// weighted mean and E = -d_h phi, so lambda^2 d_h E = C_0 - 1 holds by
// construction of the solve.
struct FieldSolution {
  Eigen::VectorXd phi;
  Eigen::VectorXd E;
  double lambda = 0.0;
};

// Solves -lambda^2 d_h(d_h phi) = C_0 - 1 with sum_j dx_j phi_j = 0 on a
// periodic mesh with an odd cell count. The Laplacian is the composition of
// the centered difference with itself (wide stencil): the transport terms use
// the same d_h, which is what makes lambda^2 d_h E = C_0 - 1 exact at the
// discrete level. Zero mean is enforced through one Lagrange multiplier
// row/column appended to the sparse system; the factorization is computed
// once per (mesh, lambda) and is immutable afterwards.
class PoissonSolver {
 public:
  PoissonSolver(std::shared_ptr<const Mesh1D> mesh, double lambda);

  FieldSolution solve(const Eigen::VectorXd& c0) const;

  double lambda() const { return lambda_; }
  const Mesh1D& mesh() const { return *mesh_; }

 private:
  std::shared_ptr<const Mesh1D> mesh_;
  double lambda_;
  Eigen::SparseMatrix<double> op_;  // (n+1) x (n+1) augmented operator
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

// E = -d_h phi.
Eigen::VectorXd field_from_potential(const Mesh1D& mesh, const Eigen::VectorXd& phi);

}  // namespace vph
