#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vph/cases.hpp"
#include "vph/errors.hpp"
#include "vph/scheme.hpp"

using namespace vph;

namespace {

// Independent dense assembly of the implicit linear-step system, written from
// the step equations directly.
Eigen::MatrixXd dense_step_matrix(const Mesh1D& mesh, double lambda, double T0, int max_mode,
                                  double tau) {
  const int n = mesh.n_cells();
  const int n_modes = max_mode + 1;
  const int dim = (n_modes + 1) * n + 1;
  const int phi0 = n_modes * n;
  const int mu = dim - 1;
  auto idx = [&](int k, int j) { return k * n + ((j % n) + n) % n; };
  auto hd = [&](int j) { return mesh.half_inv_dx()[((j % n) + n) % n]; };

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < n_modes; ++k) {
    for (int j = 0; j < n; ++j) {
      const int row = idx(k, j);
      a(row, row) += 1.0;
      if (k >= 1) {
        a(row, idx(k - 1, j + 1)) += tau * std::sqrt(T0 * k) * hd(j);
        a(row, idx(k - 1, j - 1)) -= tau * std::sqrt(T0 * k) * hd(j);
      }
      if (k + 1 <= max_mode) {
        a(row, idx(k + 1, j + 1)) += tau * std::sqrt(T0 * (k + 1)) * hd(j);
        a(row, idx(k + 1, j - 1)) -= tau * std::sqrt(T0 * (k + 1)) * hd(j);
      }
      if (k == 1) {
        a(row, phi0 + (j + 1) % n) += tau / std::sqrt(T0) * hd(j);
        a(row, phi0 + (j + n - 1) % n) -= tau / std::sqrt(T0) * hd(j);
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    const int row = phi0 + j;
    a(row, phi0 + (j + 2) % n) -= lambda * lambda * hd(j) * hd(j + 1);
    a(row, phi0 + j) += lambda * lambda * hd(j) * (hd(j + 1) + hd(j - 1));
    a(row, phi0 + (j + n - 2) % n) -= lambda * lambda * hd(j) * hd(j - 1);
    a(row, idx(0, j)) -= 1.0;
    a(row, mu) += 1.0;
    a(mu, phi0 + j) = mesh.widths()[j];
  }
  return a;
}

HermiteState perturbed_state(std::shared_ptr<const Mesh1D> mesh, int max_mode, double lambda,
                             double amplitude) {
  CaseSpec spec;
  spec.id = CaseId::near_equilibrium;
  spec.delta = amplitude;
  spec.alpha = 0.0;
  spec.lambda = lambda;
  spec.apply_defaults();
  return near_equilibrium(spec, std::move(mesh), max_mode);
}

}  // namespace

TEST_CASE("config validation") {
  SchemeConfig cfg;
  cfg.dt = 0.1;
  cfg.t_final = 1.0;
  cfg.lambda = 0.1;
  cfg.max_mode = 4;
  cfg.mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 33);
  CHECK_NOTHROW(cfg.validate());
  SchemeConfig bad = cfg;
  bad.order = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.max_mode = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 32);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("gamma matches the stiffly accurate tableau") {
  CHECK(kSdirkGamma == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-16));
}

TEST_CASE("linear solve matches an independently assembled dense oracle") {
  auto mesh = Mesh1D::make_uniform_shared(-1.0, 1.0, 5);
  const int max_mode = 2;
  const double lambda = 0.7, T0 = 1.3, tau = 0.25;
  LinearStepOperator op(mesh, lambda, T0, max_mode, tau);
  const Eigen::MatrixXd dense = dense_step_matrix(*mesh, lambda, T0, max_mode, tau);

  // the two assemblies agree entry by entry
  CHECK((Eigen::MatrixXd(op.matrix()) - dense).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(dense);
  std::mt19937 rng(41);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd rhs(max_mode + 1, 5);
    for (int k = 0; k <= max_mode; ++k)
      for (int j = 0; j < 5; ++j) rhs(k, j) = dist(rng);
    const auto sol = op.solve(rhs);

    Eigen::VectorXd b(dense.rows());
    for (int k = 0; k <= max_mode; ++k)
      for (int j = 0; j < 5; ++j) b[k * 5 + j] = rhs(k, j);
    b.segment((max_mode + 1) * 5, 5).setConstant(-1.0);
    b[b.size() - 1] = 0.0;
    const Eigen::VectorXd x = lu.solve(b);

    double worst = 0.0;
    for (int k = 0; k <= max_mode; ++k)
      for (int j = 0; j < 5; ++j)
        worst = std::max(worst, std::abs(sol.coeffs(k, j) - x[k * 5 + j]));
    for (int j = 0; j < 5; ++j)
      worst = std::max(worst, std::abs(sol.phi[j] - x[(max_mode + 1) * 5 + j]));
    CHECK(worst < 1e-12 * (1.0 + x.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("assembled matrix reproduces the hand-evaluated step residual") {
  auto mesh = Mesh1D::make_uniform_shared(-2.0, 2.0, 9);
  const int max_mode = 3;
  const double lambda = 0.4, T0 = 0.9, tau = 0.15;
  LinearStepOperator op(mesh, lambda, T0, max_mode, tau);

  std::mt19937 rng(47);
  std::normal_distribution<double> dist;
  const int n = 9;
  Eigen::MatrixXd c(max_mode + 1, n);
  Eigen::VectorXd phi(n);
  for (int k = 0; k <= max_mode; ++k)
    for (int j = 0; j < n; ++j) c(k, j) = dist(rng);
  for (auto& x : phi) x = dist(rng);
  const double mu = dist(rng);

  Eigen::VectorXd x((max_mode + 2) * n + 1);
  for (int k = 0; k <= max_mode; ++k)
    for (int j = 0; j < n; ++j) x[k * n + j] = c(k, j);
  x.segment((max_mode + 1) * n, n) = phi;
  x[x.size() - 1] = mu;

  const Eigen::VectorXd y = op.matrix() * x;

  for (int k = 0; k <= max_mode; ++k) {
    Eigen::VectorXd expected = c.row(k).transpose();
    if (k >= 1) expected += tau * std::sqrt(T0 * k) * dh(*mesh, c.row(k - 1).transpose());
    if (k + 1 <= max_mode)
      expected += tau * std::sqrt(T0 * (k + 1)) * dh(*mesh, c.row(k + 1).transpose());
    if (k == 1) expected += tau / std::sqrt(T0) * dh(*mesh, phi);
    CHECK((y.segment(k * n, n) - expected).cwiseAbs().maxCoeff() < 1e-13);
  }
  const Eigen::VectorXd poisson_row = -lambda * lambda * dh(*mesh, dh(*mesh, phi)) -
                                      c.row(0).transpose() + Eigen::VectorXd::Constant(n, mu);
  CHECK((y.segment((max_mode + 1) * n, n) - poisson_row).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(y[x.size() - 1] == doctest::Approx(mesh->widths().dot(phi)).epsilon(1e-14));
}

TEST_CASE("quasineutral steady state is a fixed point") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 33);
  for (int order : {1, 2}) {
    for (double dt : {0.01, 0.5, 10.0}) {
      SchemeConfig cfg;
      cfg.dt = dt;
      cfg.t_final = dt * 3;
      cfg.order = order;
      cfg.lambda = 0.1;
      cfg.max_mode = 8;
      cfg.mesh = mesh;
      Integrator integ(cfg);
      auto state = HermiteState::steady({1.0, 8}, mesh);
      for (int step = 0; step < 3; ++step) {
        const auto out = integ.step(state);
        Eigen::MatrixXd dev = state.coeffs;
        dev.row(0).array() -= 1.0;
        CHECK(dev.cwiseAbs().maxCoeff() < 1e-13);
        // E amplifies density round-off by 1/(lambda^2 sigma); its floor sits
        // slightly above the state's.
        CHECK(out.field.E.cwiseAbs().maxCoeff() < 5e-13);
      }
    }
  }
}

TEST_CASE("first-order step: stationary Maxwellian stays put and invariants hold") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 65);
  SchemeConfig cfg;
  cfg.dt = 0.05;
  cfg.t_final = 1.0;
  cfg.order = 1;
  cfg.lambda = 0.1;
  cfg.max_mode = 12;
  cfg.mesh = mesh;

  SUBCASE("delta = 0 gives the steady state for all n") {
    Integrator integ(cfg);
    auto state = perturbed_state(mesh, 12, 0.1, 0.0);
    for (int n = 0; n < 20; ++n) integ.step(state);
    Eigen::MatrixXd dev = state.coeffs;
    dev.row(0).array() -= 1.0;
    CHECK(dev.cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("mass and flux are conserved to round-off") {
    Integrator integ(cfg);
    auto state = perturbed_state(mesh, 12, 0.1, 0.1);
    const double mass0 = cell_integral(*mesh, state.coeffs.row(0).transpose());
    for (int n = 0; n < 20; ++n) {
      integ.step(state);
      const double mass = cell_integral(*mesh, state.coeffs.row(0).transpose());
      const double flux = cell_integral(*mesh, state.coeffs.row(1).transpose());
      CHECK(std::abs(mass - mass0) < 1e-13 * mesh->length());
      CHECK(std::abs(flux) < 1e-13);
    }
  }
}

TEST_CASE("field-coupling step") {
  SUBCASE("zero field is the identity") {
    Eigen::MatrixXd c = Eigen::MatrixXd::Random(5, 7);
    const Eigen::MatrixXd out = nonlinear_step(c, Eigen::VectorXd::Zero(7), 0.3, 1.0);
    CHECK((out - c).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("unit density leaves C_1 unchanged and feeds C_2 through C_1") {
    const double tau = 0.2, T0 = 1.0, e = 0.7;
    Eigen::MatrixXd c(4, 1);
    c << 1.0, 0.5, -0.25, 0.125;
    const Eigen::MatrixXd out = nonlinear_step(c, Eigen::VectorXd::Constant(1, e), tau, T0);
    CHECK(out(0, 0) == 1.0);
    CHECK(out(1, 0) == 0.5);  // Kronecker delta cancels C_0 - 1
    CHECK(out(2, 0) ==
          doctest::Approx(-0.25 + tau * std::sqrt(2.0 / T0) * e * 0.5).epsilon(1e-15));
  }
  SUBCASE("random single cell against the forward recursion oracle") {
    std::mt19937 rng(53);
    std::normal_distribution<double> dist;
    const double tau = 0.37, T0 = 1.4;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd c(4, 1);
      for (int k = 0; k < 4; ++k) c(k, 0) = dist(rng);
      const double e = dist(rng);
      const Eigen::MatrixXd out = nonlinear_step(c, Eigen::VectorXd::Constant(1, e), tau, T0);
      Eigen::VectorXd expected(4);
      expected[0] = c(0, 0);
      expected[1] = c(1, 0) + tau * std::sqrt(1.0 / T0) * e * (expected[0] - 1.0);
      expected[2] = c(2, 0) + tau * std::sqrt(2.0 / T0) * e * expected[1];
      expected[3] = c(3, 0) + tau * std::sqrt(3.0 / T0) * e * expected[2];
      CHECK((out.col(0) - expected).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("sdirk2 substep") {
  SUBCASE("zero operator is the identity") {
    const double y = sdirk2_substep(3.5, 0.7, [](double rhs, double) { return rhs; });
    CHECK(y == 3.5);
  }
  SUBCASE("scalar test equation matches the stability function") {
    const double g = kSdirkGamma;
    for (double a : {-2.0, -0.5, 0.8}) {
      for (double tau : {0.1, 1.0}) {
        // dY/dt + F(Y) = 0 with F(y) = -a y, stage solve (1 - s a) y = rhs
        const double y0 = 1.7;
        const double y =
            sdirk2_substep(y0, tau, [&](double rhs, double s) { return rhs / (1.0 - s * a); });
        const double z = a * tau;
        const double r = (1.0 + (1.0 - 2.0 * g) * z) / ((1.0 - g * z) * (1.0 - g * z));
        CHECK(y == doctest::Approx(r * y0).epsilon(1e-14));
      }
    }
  }
  SUBCASE("stiff accuracy: the b-row update lands on the last stage") {
    const double a = 0.6, tau = 0.9, y0 = 2.0, g = kSdirkGamma;
    double last_rhs = 0.0, last_s = 0.0;
    const double y = sdirk2_substep(y0, tau, [&](double rhs, double s) {
      last_rhs = rhs;
      last_s = s;
      return rhs / (1.0 + s * a);  // F(y) = a y
    });
    // K2 from the second stage equation, then y0 - (1-g) tau K1 - g tau K2
    const double k2 = (last_rhs - y) / last_s;
    CHECK(last_rhs - g * tau * k2 == doctest::Approx(y).epsilon(1e-15));
  }
}

TEST_CASE("strang step self-convergence is second order") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 33);
  const int max_mode = 8;
  HermiteBasisSpec basis{1.0, max_mode};
  HermiteState initial(basis, mesh);
  for (int j = 0; j < 33; ++j) {
    const double t_in = 1.0 + 0.1 * std::cos(M_PI / 10.0 * mesh->centers()[j]);
    initial.coeffs.col(j) = project([t_in](double v) { return maxwellian(v, t_in); }, basis, 64);
  }

  auto advance = [&](double dt, int order) {
    SchemeConfig cfg;
    cfg.dt = dt;
    cfg.t_final = 0.5;
    cfg.order = order;
    cfg.lambda = 1.0;
    cfg.max_mode = max_mode;
    cfg.mesh = mesh;
    Integrator integ(cfg);
    HermiteState state = initial;
    const long steps = std::lround(0.5 / dt);
    for (long n = 0; n < steps; ++n) integ.step(state);
    return state;
  };

  const HermiteState ref = advance(0.5 / 512, 2);
  std::vector<double> dts{0.05, 0.025, 0.0125}, errs;
  for (double dt : dts) errs.push_back((advance(dt, 2).coeffs - ref.coeffs).cwiseAbs().maxCoeff());
  const double order_a = std::log2(errs[0] / errs[1]);
  const double order_b = std::log2(errs[1] / errs[2]);
  CHECK(order_a > 1.7);
  CHECK(order_b > 1.7);

  // the first-order integrator separates visibly from the second-order one
  const double sep = (advance(0.05, 1).coeffs - advance(0.05, 2).coeffs).cwiseAbs().maxCoeff();
  CHECK(sep > errs[0]);
}

TEST_CASE("unconditional solvability across dt / lambda ratios") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 33);
  const double lambda = 0.1;
  for (double ratio : {1e-2, 1.0, 1e2, 1e4}) {
    SchemeConfig cfg;
    cfg.dt = ratio * lambda;
    cfg.t_final = cfg.dt;
    cfg.order = 1;
    cfg.lambda = lambda;
    cfg.max_mode = 8;
    cfg.mesh = mesh;
    Integrator integ(cfg);
    auto state = perturbed_state(mesh, 8, lambda, 0.1);
    CHECK_NOTHROW(integ.step(state));
    CHECK(state.coeffs.allFinite());
  }
}

TEST_CASE("run bookkeeping") {
  auto mesh = Mesh1D::make_uniform_shared(-10.0, 10.0, 33);
  SchemeConfig cfg;
  cfg.dt = 0.1;
  cfg.t_final = 1.0;
  cfg.order = 2;
  cfg.lambda = 0.1;
  cfg.max_mode = 4;
  cfg.mesh = mesh;

  SUBCASE("t_final = 0 performs no steps") {
    cfg.t_final = 0.0;
    int calls = 0;
    auto state = HermiteState::steady({1.0, 4}, mesh);
    const auto result = run(cfg, state, {[&](const StepContext& ctx) {
                           ++calls;
                           CHECK(ctx.step == 0);
                         }});
    CHECK(calls == 1);
    CHECK(result.steps_taken == 0);
  }
  SUBCASE("step count is ceil(t_final / dt)") {
    cfg.t_final = 0.95;
    int last = -1;
    run(cfg, HermiteState::steady({1.0, 4}, mesh),
        {[&](const StepContext& ctx) { last = static_cast<int>(ctx.step); }});
    CHECK(last == 10);
  }
  SUBCASE("observer failures abort with the step index") {
    auto state = HermiteState::steady({1.0, 4}, mesh);
    try {
      run(cfg, state, {[](const StepContext& ctx) {
            if (ctx.step == 3) throw std::runtime_error("boom");
          }});
      FAIL("expected an exception");
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find("step 3") != std::string::npos);
    }
  }
  SUBCASE("first-order trajectories expose the intermediate C_2") {
    cfg.order = 1;
    int with = 0, without = 0;
    run(cfg, HermiteState::steady({1.0, 4}, mesh), {[&](const StepContext& ctx) {
          if (ctx.c2_step1)
            ++with;
          else
            ++without;
        }});
    CHECK(without == 1);  // only the initial record
    CHECK(with == 10);
  }
}
