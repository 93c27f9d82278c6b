#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>

// Data-parallel inner loops shared by the solver modules. Each kernel has an
// OpenMP implementation (this namespace) and a serial reference twin under
// kernels::ref with identical semantics; the test suite checks one against
// the other and the benchmark target compares their throughput.
namespace vph::kernels {

// out_j = (u_{j+1} - u_{j-1}) * half_inv_dx_j, periodic wrap.
void central_diff(std::span<const double> u, std::span<const double> half_inv_dx,
                  std::span<double> out);

// In-place sequential-in-mode update, independently per cell:
//   C_{k,j} <- C_{k,j} + gain_k * E_j * (C_{k-1,j} - [k == 1]),  k = 1..K.
// coeffs is (K+1) x n_cells column-major.
void coupling_sweep(double* coeffs, int n_modes_p1, int n_cells,
                    const double* e_field, const double* gain);

// out(k, m) = Psi_k(v_m) for k = 0..K, column-major (K+1) x v.size().
// Evaluated through the weighted three-term recurrence, so entries stay bounded.
void basis_matrix(std::span<const double> v, double T0, int max_mode, double* out);

// Quadrature projection of a phase-space profile, independently per cell:
//   out(k, j) = sum_i weights_i * f(x_j, nodes_i) * poly(k, i).
void project_cells(const std::function<double(double, double)>& f,
                   std::span<const double> x, std::span<const double> nodes,
                   std::span<const double> weights, const Eigen::MatrixXd& poly,
                   Eigen::MatrixXd& out);

namespace ref {

void central_diff(std::span<const double> u, std::span<const double> half_inv_dx,
                  std::span<double> out);
void coupling_sweep(double* coeffs, int n_modes_p1, int n_cells,
                    const double* e_field, const double* gain);
void basis_matrix(std::span<const double> v, double T0, int max_mode, double* out);
void project_cells(const std::function<double(double, double)>& f,
                   std::span<const double> x, std::span<const double> nodes,
                   std::span<const double> weights, const Eigen::MatrixXd& poly,
                   Eigen::MatrixXd& out);

}  // namespace ref
}  // namespace vph::kernels
