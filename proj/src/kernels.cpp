#include "vph/kernels.hpp"

#include <cmath>

namespace vph::kernels {

namespace {

inline void central_diff_at(std::span<const double> u, std::span<const double> half_inv_dx,
                            std::span<double> out, long j) {
  const long n = static_cast<long>(u.size());
  const long jp = (j + 1 == n) ? 0 : j + 1;
  const long jm = (j == 0) ? n - 1 : j - 1;
  out[j] = (u[jp] - u[jm]) * half_inv_dx[j];
}

inline void sweep_cell(double* col, int n_modes_p1, double e, const double* gain) {
  // k = 1 carries the background charge: the source is E (C_0 - 1).
  col[1] += gain[1] * e * (col[0] - 1.0);
  for (int k = 2; k < n_modes_p1; ++k) col[k] += gain[k] * e * col[k - 1];
}

inline void basis_column(double v, double T0, int max_mode, double* col) {
  const double inv_sqrt_T0 = 1.0 / std::sqrt(T0);
  col[0] = std::exp(-v * v / (2.0 * T0)) / std::sqrt(2.0 * M_PI * T0);
  if (max_mode >= 1) col[1] = v * col[0] * inv_sqrt_T0;
  for (int k = 1; k < max_mode; ++k)
    col[k + 1] = (v * col[k] - std::sqrt(T0 * k) * col[k - 1]) / std::sqrt(T0 * (k + 1));
}

inline void project_cell(const std::function<double(double, double)>& f, double x,
                         std::span<const double> nodes, std::span<const double> weights,
                         const Eigen::MatrixXd& poly, Eigen::MatrixXd& out, long j) {
  const long q = static_cast<long>(nodes.size());
  Eigen::VectorXd fw(q);
  for (long i = 0; i < q; ++i) fw[i] = weights[i] * f(x, nodes[i]);
  out.col(j).noalias() = poly * fw;
}

}  // namespace

void central_diff(std::span<const double> u, std::span<const double> half_inv_dx,
                  std::span<double> out) {
  const long n = static_cast<long>(u.size());
  // per-element work is a few flops; entering the parallel region only pays
  // off on large meshes
  if (n < 8192) {
    ref::central_diff(u, half_inv_dx, out);
    return;
  }
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) central_diff_at(u, half_inv_dx, out, j);
}

void coupling_sweep(double* coeffs, int n_modes_p1, int n_cells, const double* e_field,
                    const double* gain) {
  if (static_cast<long>(n_modes_p1) * n_cells < 65536) {
    ref::coupling_sweep(coeffs, n_modes_p1, n_cells, e_field, gain);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n_cells; ++j)
    sweep_cell(coeffs + static_cast<long>(j) * n_modes_p1, n_modes_p1, e_field[j], gain);
}

void basis_matrix(std::span<const double> v, double T0, int max_mode, double* out) {
  const long m = static_cast<long>(v.size());
  if (m * (max_mode + 1) < 16384) {
    ref::basis_matrix(v, T0, max_mode, out);
    return;
  }
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) basis_column(v[i], T0, max_mode, out + i * (max_mode + 1));
}

void project_cells(const std::function<double(double, double)>& f, std::span<const double> x,
                   std::span<const double> nodes, std::span<const double> weights,
                   const Eigen::MatrixXd& poly, Eigen::MatrixXd& out) {
  const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) project_cell(f, x[j], nodes, weights, poly, out, j);
}

namespace ref {

void central_diff(std::span<const double> u, std::span<const double> half_inv_dx,
                  std::span<double> out) {
  for (long j = 0; j < static_cast<long>(u.size()); ++j) central_diff_at(u, half_inv_dx, out, j);
}

void coupling_sweep(double* coeffs, int n_modes_p1, int n_cells, const double* e_field,
                    const double* gain) {
  for (int j = 0; j < n_cells; ++j)
    sweep_cell(coeffs + static_cast<long>(j) * n_modes_p1, n_modes_p1, e_field[j], gain);
}

void basis_matrix(std::span<const double> v, double T0, int max_mode, double* out) {
  for (long i = 0; i < static_cast<long>(v.size()); ++i)
    basis_column(v[i], T0, max_mode, out + i * (max_mode + 1));
}

void project_cells(const std::function<double(double, double)>& f, std::span<const double> x,
                   std::span<const double> nodes, std::span<const double> weights,
                   const Eigen::MatrixXd& poly, Eigen::MatrixXd& out) {
  for (long j = 0; j < static_cast<long>(x.size()); ++j)
    project_cell(f, x[j], nodes, weights, poly, out, j);
}

}  // namespace ref
}  // namespace vph::kernels
