#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vph/errors.hpp"
#include "vph/field.hpp"

using namespace vph;

namespace {

// Independent Fourier-diagonalized solve on a uniform mesh: the centered
// stencil acts as i sin(kappa dx) / dx on each discrete Fourier mode.
Eigen::VectorXd dft_poisson_field(const Mesh1D& mesh, const Eigen::VectorXd& c0, double lambda) {
  const int n = mesh.n_cells();
  const double L = mesh.length();
  const double dx = L / n;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int m = 1; m <= (n - 1) / 2; ++m) {
    const double kappa = 2.0 * M_PI * m / L;
    double re = 0.0, im = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ph = kappa * mesh.centers()[j];
      re += (c0[j] - 1.0) * std::cos(ph);
      im += (c0[j] - 1.0) * std::sin(ph);
    }
    re *= 2.0 / n;
    im *= 2.0 / n;
    const double sigma = std::sin(kappa * dx) / dx;
    // -lambda^2 (i sigma)^2 phi_m = rhs_m, E = -d_h phi
    for (int j = 0; j < n; ++j) {
      const double ph = kappa * mesh.centers()[j];
      const double phi_re = re / (lambda * lambda * sigma * sigma);
      const double phi_im = im / (lambda * lambda * sigma * sigma);
      // phi(x) = phi_re cos + phi_im sin; E = -d_h phi = sigma (phi_re sin - phi_im cos)
      e[j] += sigma * (phi_re * std::sin(ph) - phi_im * std::cos(ph));
    }
  }
  return e;
}

Eigen::VectorXd random_neutral_density(const Mesh1D& mesh, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  Eigen::VectorXd c0(mesh.n_cells());
  for (auto& x : c0) x = dist(rng);
  const double mean = mesh.widths().dot(c0) / mesh.length();
  return (c0.array() - mean + 1.0).matrix();
}

}  // namespace

TEST_CASE("uniform background produces no field") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 65);
  PoissonSolver solver(mesh, 0.5);
  const auto sol = solver.solve(Eigen::VectorXd::Ones(65));
  CHECK(sol.phi.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(sol.E.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("solution structure: zero-mean potential, composition identity, zero total field") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 129);
  std::mt19937 rng(23);
  for (double lambda : {1.0, 0.1, 1e-3}) {
    PoissonSolver solver(mesh, lambda);
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd c0 = random_neutral_density(*mesh, rng);
      const auto sol = solver.solve(c0);
      CHECK(std::abs(mesh->widths().dot(sol.phi)) < 1e-10 * sol.phi.cwiseAbs().maxCoeff());
      // lambda^2 d_h E = C_0 - 1 cell by cell
      const Eigen::VectorXd residual =
          lambda * lambda * dh(*mesh, sol.E) - (c0.array() - 1.0).matrix();
      CHECK(residual.cwiseAbs().maxCoeff() < 1e-12 * (c0.cwiseAbs().maxCoeff() + 1.0));
      CHECK(std::abs(cell_integral(*mesh, sol.E)) < 1e-10 * (1.0 + sol.E.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("agreement with the Fourier oracle") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 33);
  std::mt19937 rng(31);
  PoissonSolver solver(mesh, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd c0 = random_neutral_density(*mesh, rng);
    const auto sol = solver.solve(c0);
    const Eigen::VectorXd oracle = dft_poisson_field(*mesh, c0, 0.3);
    CHECK((sol.E - oracle).cwiseAbs().maxCoeff() < 1e-12 * oracle.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("field scales as amplitude over lambda squared") {
  const int n = 65;
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, n);
  const double k = M_PI / 10.0;
  auto density = [&](double eps) {
    Eigen::VectorXd c0(n);
    for (int j = 0; j < n; ++j) c0[j] = 1.0 + eps * std::cos(k * mesh->centers()[j]);
    return c0;
  };

  SUBCASE("linear in the perturbation amplitude") {
    PoissonSolver solver(mesh, 0.5);
    const auto e1 = solver.solve(density(1e-3)).E;
    const auto e2 = solver.solve(density(2e-3)).E;
    CHECK((2.0 * e1 - e2).cwiseAbs().maxCoeff() < 1e-13 * e2.cwiseAbs().maxCoeff());
  }
  SUBCASE("doubling lambda quarters the field norm") {
    PoissonSolver s1(mesh, 0.25), s2(mesh, 0.5);
    const double n1 = l2_norm(*mesh, s1.solve(density(0.1)).E);
    const double n2 = l2_norm(*mesh, s2.solve(density(0.1)).E);
    CHECK(n1 == doctest::Approx(4.0 * n2).epsilon(1e-12));
  }
}

TEST_CASE("rejects bad inputs") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 33);
  SUBCASE("non-neutral source") {
    PoissonSolver solver(mesh, 1.0);
    CHECK_THROWS_AS(solver.solve(Eigen::VectorXd::Constant(33, 1.5)), SolverError);
  }
  SUBCASE("even cell count") {
    auto even = Mesh1D::make_uniform_shared(-10.0, 10.0, 64);
    CHECK_THROWS_AS(PoissonSolver(even, 1.0), ConfigError);
  }
  SUBCASE("non-positive lambda") {
    CHECK_THROWS_AS(PoissonSolver(mesh, 0.0), ConfigError);
  }
}
