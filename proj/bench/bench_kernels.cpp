// Throughput of the OpenMP kernels against their serial reference twins at
// production sizes, plus the sparse implicit solve that dominates a run.

#include <benchmark/benchmark.h>

#include <random>

#include "vph/hermite.hpp"
#include "vph/kernels.hpp"
#include "vph/mesh.hpp"
#include "vph/scheme.hpp"

namespace {

constexpr int kCells = 513;
constexpr int kModes = 64;  // N_H

struct DiffData {
  Eigen::VectorXd u{kCells}, hdx{kCells}, out{kCells};
  DiffData() {
    std::mt19937 rng(1);
    std::normal_distribution<double> dist;
    for (auto& x : u) x = dist(rng);
    hdx.setConstant(0.5 * kCells / 20.0);
  }
};

void bm_central_diff_parallel(benchmark::State& state) {
  DiffData d;
  for (auto _ : state) {
    vph::kernels::central_diff({d.u.data(), kCells}, {d.hdx.data(), kCells},
                               {d.out.data(), kCells});
    benchmark::DoNotOptimize(d.out.data());
  }
}

void bm_central_diff_serial(benchmark::State& state) {
  DiffData d;
  for (auto _ : state) {
    vph::kernels::ref::central_diff({d.u.data(), kCells}, {d.hdx.data(), kCells},
                                    {d.out.data(), kCells});
    benchmark::DoNotOptimize(d.out.data());
  }
}

struct SweepData {
  Eigen::MatrixXd coeffs{kModes + 1, kCells};
  Eigen::VectorXd e{kCells}, gain{kModes + 1};
  SweepData() {
    std::mt19937 rng(2);
    std::normal_distribution<double> dist;
    for (int j = 0; j < kCells; ++j)
      for (int k = 0; k <= kModes; ++k) coeffs(k, j) = dist(rng);
    for (auto& x : e) x = dist(rng);
    gain[0] = 0.0;
    for (int k = 1; k <= kModes; ++k) gain[k] = 0.01 * std::sqrt(static_cast<double>(k));
  }
};

void bm_coupling_sweep_parallel(benchmark::State& state) {
  SweepData d;
  for (auto _ : state) {
    vph::kernels::coupling_sweep(d.coeffs.data(), kModes + 1, kCells, d.e.data(), d.gain.data());
    benchmark::DoNotOptimize(d.coeffs.data());
  }
}

void bm_coupling_sweep_serial(benchmark::State& state) {
  SweepData d;
  for (auto _ : state) {
    vph::kernels::ref::coupling_sweep(d.coeffs.data(), kModes + 1, kCells, d.e.data(),
                                      d.gain.data());
    benchmark::DoNotOptimize(d.coeffs.data());
  }
}

void bm_basis_matrix_parallel(benchmark::State& state) {
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(401, -8.0, 8.0);
  Eigen::MatrixXd out(kModes + 1, v.size());
  for (auto _ : state) {
    vph::kernels::basis_matrix({v.data(), static_cast<size_t>(v.size())}, 1.0, kModes, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_basis_matrix_serial(benchmark::State& state) {
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(401, -8.0, 8.0);
  Eigen::MatrixXd out(kModes + 1, v.size());
  for (auto _ : state) {
    vph::kernels::ref::basis_matrix({v.data(), static_cast<size_t>(v.size())}, 1.0, kModes,
                                    out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

struct ProjectData {
  std::function<double(double, double)> f = [](double x, double v) {
    const double t = 1.0 + 0.1 * std::cos(M_PI / 10.0 * x);
    return std::exp(-v * v / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
  };
  Eigen::VectorXd x;
  vph::GaussHermiteRule rule;
  Eigen::MatrixXd poly, out;
  ProjectData()
      : x(Eigen::VectorXd::LinSpaced(kCells, -10.0, 10.0)),
        rule(vph::gauss_hermite_rule(1.0, 2 * kModes + 8)),
        poly(vph::normalized_poly_matrix(rule.nodes, {1.0, kModes})),
        out(kModes + 1, kCells) {}
};

void bm_project_cells_parallel(benchmark::State& state) {
  ProjectData d;
  for (auto _ : state) {
    vph::kernels::project_cells(d.f, {d.x.data(), kCells},
                                {d.rule.nodes.data(), static_cast<size_t>(d.rule.nodes.size())},
                                {d.rule.plain_weights.data(),
                                 static_cast<size_t>(d.rule.plain_weights.size())},
                                d.poly, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
}

void bm_project_cells_serial(benchmark::State& state) {
  ProjectData d;
  for (auto _ : state) {
    vph::kernels::ref::project_cells(
        d.f, {d.x.data(), kCells},
        {d.rule.nodes.data(), static_cast<size_t>(d.rule.nodes.size())},
        {d.rule.plain_weights.data(), static_cast<size_t>(d.rule.plain_weights.size())}, d.poly,
        d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
}

void bm_linear_step_solve(benchmark::State& state) {
  auto mesh = vph::Mesh1D::make_uniform_shared(-10.0, 10.0, kCells);
  vph::LinearStepOperator op(mesh, 0.1, 1.0, kModes, 0.01);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(kModes + 1, kCells);
  rhs.row(0).setOnes();
  rhs.row(2).setConstant(0.01);
  for (auto _ : state) {
    auto sol = op.solve(rhs);
    benchmark::DoNotOptimize(sol.coeffs.data());
  }
}

}  // namespace

BENCHMARK(bm_central_diff_parallel);
BENCHMARK(bm_central_diff_serial);
BENCHMARK(bm_coupling_sweep_parallel);
BENCHMARK(bm_coupling_sweep_serial);
BENCHMARK(bm_basis_matrix_parallel);
BENCHMARK(bm_basis_matrix_serial);
BENCHMARK(bm_project_cells_parallel);
BENCHMARK(bm_project_cells_serial);
BENCHMARK(bm_linear_step_solve);

BENCHMARK_MAIN();
