#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vph/cases.hpp"
#include "vph/errors.hpp"
#include "vph/field.hpp"

using namespace vph;

namespace {

CaseSpec spec_for(CaseId id, double delta, double lambda, double alpha = 0.0) {
  CaseSpec spec;
  spec.id = id;
  spec.delta = delta;
  spec.alpha = alpha;
  spec.lambda = lambda;
  spec.apply_defaults();
  return spec;
}

}  // namespace

TEST_CASE("case spec validation") {
  auto spec = spec_for(CaseId::near_equilibrium, 0.1, 0.1);
  CHECK_NOTHROW(spec.validate());

  SUBCASE("defaults per case") {
    CHECK(spec.k_x == doctest::Approx(M_PI / 10.0));
    CHECK(spec.a == -10.0);
    CHECK(spec.b == 10.0);
    auto ts = spec_for(CaseId::two_stream, 0.01, 0.1);
    CHECK(ts.k_x == doctest::Approx(M_PI / 6.0));
    CHECK(ts.a == -6.0);
    CHECK(ts.b == 6.0);
  }
  SUBCASE("non-periodic frequency is rejected") {
    spec.k_x = 0.3;  // 0.3 * 20 is not a multiple of 2 pi
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }
  SUBCASE("temperature positivity") {
    auto bad = spec_for(CaseId::temperature_perturbation, 1.5, 0.1);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
  SUBCASE("alpha range") {
    spec.alpha = 1.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
  }
}

TEST_CASE("near equilibrium") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 129);

  SUBCASE("delta = 0 is the steady state") {
    const auto state = near_equilibrium(spec_for(CaseId::near_equilibrium, 0.0, 0.1), mesh, 8);
    Eigen::MatrixXd dev = state.coeffs;
    dev.row(0).array() -= 1.0;
    CHECK(dev.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("center-cell value matches the published parameters") {
    // delta = 0.1, alpha = 0, lambda = 0.1: amplitude 1e-3 at x = 0
    const auto state = near_equilibrium(spec_for(CaseId::near_equilibrium, 0.1, 0.1), mesh, 8);
    CHECK(state.coeffs(0, 64) == doctest::Approx(1.001).epsilon(1e-14));
    CHECK(state.coeffs.bottomRows(8).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("alpha changes the amplitude scale") {
    const auto a0 = near_equilibrium(spec_for(CaseId::near_equilibrium, 0.1, 0.1, 0.0), mesh, 4);
    const auto a1 = near_equilibrium(spec_for(CaseId::near_equilibrium, 0.1, 0.1, 1.0), mesh, 4);
    const double amp0 = (a0.coeffs.row(0).maxCoeff() - 1.0);
    const double amp1 = (a1.coeffs.row(0).maxCoeff() - 1.0);
    CHECK(amp1 == doctest::Approx(10.0 * amp0).epsilon(1e-10));
  }
  SUBCASE("quadrature projection of the same profile matches the analytic coefficients") {
    const auto spec = spec_for(CaseId::near_equilibrium, 0.1, 0.1);
    const auto state = near_equilibrium(spec, mesh, 8);
    HermiteBasisSpec basis{1.0, 8};
    for (int j : {0, 31, 64}) {
      const double x = mesh->centers()[j];
      const double density = 1.0 + 0.1 * 0.01 * std::cos(spec.k_x * x);
      const auto projected =
          project([density](double v) { return density * maxwellian(v, 1.0); }, basis, 64);
      CHECK((projected - state.coeffs.col(j)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("temperature perturbation") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 65);
  const auto spec = spec_for(CaseId::temperature_perturbation, 0.1, 0.1);

  SUBCASE("delta = 0 is the steady state") {
    const auto state =
        temperature_perturbation(spec_for(CaseId::temperature_perturbation, 0.0, 0.1), mesh, 16);
    Eigen::MatrixXd dev = state.coeffs;
    dev.row(0).array() -= 1.0;
    CHECK(dev.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("per-cell moments are (1, 0, T_in)") {
    const auto state = temperature_perturbation(spec, mesh, 24);
    const auto m = moments(state);
    for (int j = 0; j < 65; ++j) {
      CHECK(m.density[j] == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs(m.current[j]) < 1e-10);
      CHECK(m.kinetic_energy[j] ==
            doctest::Approx(spec.temperature_at(mesh->centers()[j])).epsilon(1e-10));
    }
  }
  SUBCASE("odd coefficients vanish") {
    const auto state = temperature_perturbation(spec, mesh, 24);
    for (int k = 1; k <= 24; k += 2)
      CHECK(state.coeffs.row(k).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("oscillatory perturbation") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 33);

  SUBCASE("delta = 0 reduces to the temperature case") {
    const auto a =
        oscillatory_perturbation(spec_for(CaseId::oscillatory_perturbation, 0.0, 0.1), mesh, 16);
    const auto b =
        temperature_perturbation(spec_for(CaseId::temperature_perturbation, 0.0, 0.1), mesh, 16);
    CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("density stays one and flux zero per cell") {
    const auto state =
        oscillatory_perturbation(spec_for(CaseId::oscillatory_perturbation, 0.05, 0.1), mesh, 160);
    const auto m = moments(state);
    for (int j = 0; j < 33; ++j) {
      CHECK(m.density[j] == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs(m.current[j]) < 1e-10);
    }
  }
  SUBCASE("coefficient decay at the retained-mode boundary") {
    // sin(3 pi v) spreads spectral content up to k near (3 pi)^2 T; the tail
    // falls below 1e-8 around mode 180
    const auto state =
        oscillatory_perturbation(spec_for(CaseId::oscillatory_perturbation, 0.05, 0.1), mesh, 180);
    CHECK(state.coeffs.row(180).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(state.coeffs.row(179).cwiseAbs().maxCoeff() < 1e-8);
    // and the mid-spectrum content is genuinely there
    CHECK(state.coeffs.middleRows(80, 10).cwiseAbs().maxCoeff() > 1e-4);
  }
}

TEST_CASE("two stream") {
  auto mesh = Mesh1D::make_uniform_shared(-6.0, 6.0, 65);
  const auto spec = spec_for(CaseId::two_stream, 0.01, 0.1);

  SUBCASE("density is one per cell: the 1/6 prefactor normalizes the bump") {
    const auto state = two_stream(spec, mesh, 64);
    const auto m = moments(state);
    for (int j = 0; j < 65; ++j) CHECK(m.density[j] == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("delta = 0 is homogeneous with zero field") {
    const auto state = two_stream(spec_for(CaseId::two_stream, 0.0, 0.1), mesh, 32);
    for (int k = 0; k <= 32; ++k) {
      const double spread =
          state.coeffs.row(k).maxCoeff() - state.coeffs.row(k).minCoeff();
      CHECK(spread < 1e-12);
    }
    PoissonSolver solver(mesh, 0.1);
    const auto field = solver.solve(state.coeffs.row(0).transpose());
    CHECK(field.E.cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("reconstruction is bimodal in velocity") {
    const auto state = two_stream(spec, mesh, 64);
    const int n_v = 241;
    const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n_v, -4.0, 4.0);
    const auto f = reconstruct(state, v);
    // count strict local maxima of the center-cell profile
    int maxima = 0;
    double first_peak_v = 0.0, second_peak_v = 0.0;
    for (int i = 1; i + 1 < n_v; ++i) {
      if (f(32, i) > f(32, i - 1) && f(32, i) > f(32, i + 1)) {
        if (maxima == 0) first_peak_v = v[i];
        if (maxima == 1) second_peak_v = v[i];
        ++maxima;
      }
    }
    CHECK(maxima == 2);
    CHECK(first_peak_v == doctest::Approx(-second_peak_v).epsilon(0.05));
  }
}

TEST_CASE("generated states satisfy the global mass and flux hypotheses") {
  for (auto id : {CaseId::near_equilibrium, CaseId::temperature_perturbation,
                  CaseId::oscillatory_perturbation, CaseId::two_stream}) {
    const double delta = id == CaseId::two_stream ? 0.01 : 0.05;
    auto spec = spec_for(id, delta, 0.1);
    auto mesh = Mesh1D::make_uniform_shared(spec.a, spec.b, 65);
    const int max_mode = id == CaseId::oscillatory_perturbation ? 140 : 24;
    const auto state = make_initial_state(spec, mesh, max_mode);
    const double mass = cell_integral(*mesh, state.coeffs.row(0).transpose());
    const double flux = cell_integral(*mesh, state.coeffs.row(1).transpose());
    CHECK(mass == doctest::Approx(spec.b - spec.a).epsilon(1e-10));
    CHECK(std::abs(flux) < 1e-10);
  }
}

TEST_CASE("generators converge cellwise under mesh refinement") {
  const auto spec = spec_for(CaseId::temperature_perturbation, 0.1, 0.1);
  // C_2 sampled at the cell nearest a fixed off-grid point approaches the
  // analytic (T(x*) - 1)/sqrt(2) as the mesh refines
  const double x_star = 2.3;
  const double target = (spec.temperature_at(x_star) - 1.0) / std::sqrt(2.0);
  // |C_2(x_j) - C_2(x*)| <= |T'|_max / sqrt(2) * dx / 2 at the nearest center
  const double slope_bound = spec.delta * spec.k_x / std::sqrt(2.0);
  for (int n : {17, 65, 257, 1025}) {
    auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, n);
    const auto state = temperature_perturbation(spec, mesh, 16);
    int nearest = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(mesh->centers()[j] - x_star) < std::abs(mesh->centers()[nearest] - x_star))
        nearest = j;
    const double err = std::abs(state.coeffs(2, nearest) - target);
    const double dx = 20.0 / n;
    CHECK(err <= slope_bound * 0.5 * dx * 1.05 + 1e-12);
  }
}
