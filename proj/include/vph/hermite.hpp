#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "vph/mesh.hpp"

namespace vph {

// Basis of Hermite functions Psi_k weighted by the Maxwellian with reference
// temperature T0:
//   Psi_0(v) = M(v) = exp(-v^2 / (2 T0)) / sqrt(2 pi T0),
//   v Psi_k  = sqrt(T0 k) Psi_{k-1} + sqrt(T0 (k+1)) Psi_{k+1},
// orthonormal against the inverse Gaussian weight M^{-1}.
struct HermiteBasisSpec {
  double T0 = 1.0;
  int max_mode = 2;  // highest retained mode index N_H

  void validate() const;
  // Default quadrature order for projections; analytic-in-T0 profiles need
  // no headroom, everything else gets the larger floor.
  int default_quadrature(bool analytic_profile = false) const;
};

double maxwellian(double v, double T0);

// Psi_0(v) .. Psi_{max_mode}(v) through the weighted recurrence.
Eigen::VectorXd eval_basis(double v, const HermiteBasisSpec& spec);

// Gauss quadrature for the Gaussian measure M(v) dv at temperature T0:
// sum_i weights[i] g(nodes[i]) ~ int g(v) M(v) dv, exact for deg(g) <= 2 order - 1.
// plain_weights[i] = weights[i] / M(nodes[i]) integrates Gaussian-localized
// functions against dv directly.
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::VectorXd plain_weights;
};

GaussHermiteRule gauss_hermite_rule(double T0, int order);

// Orthonormal polynomials P_k = Psi_k / M evaluated at each node,
// (max_mode+1) x nodes.size(). Internal building block of the projections.
Eigen::MatrixXd normalized_poly_matrix(const Eigen::VectorXd& nodes, const HermiteBasisSpec& spec);

// C_k = int profile(v) Psi_k(v) M^{-1}(v) dv by Gauss quadrature matched to
// the weight exp(-v^2 / (2 T0)). quad_order must be >= 2 max_mode.
Eigen::VectorXd project(const std::function<double(double)>& profile,
                        const HermiteBasisSpec& spec, int quad_order);

// Hermite coefficients C_{k,j} over a mesh; the sole evolving state of the
// simulation. Value-semantic, mesh shared immutably.
struct HermiteState {
  HermiteState(HermiteBasisSpec basis_spec, std::shared_ptr<const Mesh1D> mesh_ptr);

  Eigen::MatrixXd coeffs;  // (max_mode+1) x n_cells, row k = mode, col j = cell
  HermiteBasisSpec basis;
  std::shared_ptr<const Mesh1D> mesh;

  int n_modes() const { return basis.max_mode + 1; }
  bool all_finite() const { return coeffs.allFinite(); }

  // The quasineutral steady state C = (1, 0, ..., 0).
  static HermiteState steady(HermiteBasisSpec basis_spec, std::shared_ptr<const Mesh1D> mesh_ptr);
};

// f(x_j, v_m) = sum_k C_{k,j} Psi_k(v_m); rows = cells, cols = velocity samples.
Eigen::MatrixXd reconstruct(const HermiteState& state, const Eigen::VectorXd& v_grid);

// Single-point reconstruction of the velocity profile at cell j.
double reconstruct_at(const HermiteState& state, int cell, double v);

// rho = C_0, current j = sqrt(T0) C_1, kinetic energy K = T0 (sqrt(2) C_2 + C_0).
struct Moments {
  Eigen::VectorXd density;
  Eigen::VectorXd current;
  Eigen::VectorXd kinetic_energy;
};

Moments moments(const HermiteState& state);

}  // namespace vph
