#pragma once

#include <Eigen/Dense>
#include <memory>

namespace vph {

// 1D periodic finite-volume mesh on [a, b]. Cell j has center x_j and width
// dx_j; indices wrap modulo the cell count. Immutable after construction.
class Mesh1D {
 public:
  Mesh1D(double a, double b, Eigen::VectorXd widths);

  static Mesh1D make_uniform(double a, double b, int n_cells);
  static std::shared_ptr<const Mesh1D> make_uniform_shared(double a, double b, int n_cells);

  int n_cells() const { return static_cast<int>(widths_.size()); }
  double a() const { return a_; }
  double b() const { return b_; }
  double length() const { return b_ - a_; }
  bool is_uniform() const { return uniform_; }
  double regularity_ratio() const;  // max dx_i / min dx_j

  const Eigen::VectorXd& centers() const { return centers_; }
  const Eigen::VectorXd& widths() const { return widths_; }
  // 1/(2 dx_j), the per-cell factor of the centered difference.
  const Eigen::VectorXd& half_inv_dx() const { return half_inv_dx_; }

 private:
  double a_, b_;
  Eigen::VectorXd centers_, widths_, half_inv_dx_;
  bool uniform_;
};

// Centered difference with periodic wrap: (d_h u)_j = (u_{j+1} - u_{j-1}) / (2 dx_j).
Eigen::VectorXd dh(const Mesh1D& mesh, const Eigen::VectorXd& u);

// Sum_j dx_j u_j.
double cell_integral(const Mesh1D& mesh, const Eigen::VectorXd& u);

// ||u||_{l2}^2 = sum_j |u_j|^2 dx_j.
double l2_norm(const Mesh1D& mesh, const Eigen::VectorXd& u);

// ||u||_{h^r}^2 = sum_{s<=r} ||d_h^s u||_{l2}^2.
double hr_norm(const Mesh1D& mesh, const Eigen::VectorXd& u, int order);

struct NormPair {
  double l2;
  double hr;
};

NormPair norms(const Mesh1D& mesh, const Eigen::VectorXd& u, int order);

}  // namespace vph
