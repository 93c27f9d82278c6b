#include "vph/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vph/errors.hpp"
#include "vph/version.hpp"

namespace vph {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Writes atomically enough for our purposes: any failure drops an INCOMPLETE
// marker next to the partial output.
class OutputDir {
 public:
  explicit OutputDir(const fs::path& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("output: cannot create directory " + dir_.string());
  }

  void write(const std::string& name, const std::string& content) const {
    const fs::path p = dir_ / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) {
      mark_incomplete();
      throw IoError("output: cannot open " + p.string());
    }
    os << content;
    os.flush();
    if (!os) {
      mark_incomplete();
      throw IoError("output: write failed for " + p.string());
    }
  }

  const fs::path& dir() const { return dir_; }

 private:
  void mark_incomplete() const {
    std::ofstream marker(dir_ / "INCOMPLETE");
    marker << "a write failed; outputs in this directory are partial\n";
  }

  fs::path dir_;
};

std::string records_csv(const std::vector<DiagnosticsRecord>& records) {
  std::ostringstream os;
  os << "t,potential_energy,mass,flux,total_energy,err0_cont,err1_cont,err0_disc,err1_disc,"
        "reformulated_residual,e_norm,e_slow_norm\n";
  for (const auto& r : records) {
    os << fmt(r.t) << ',' << fmt(r.potential_energy) << ',' << fmt(r.mass) << ',' << fmt(r.flux)
       << ',' << fmt(r.total_energy) << ',' << fmt(r.err0_cont) << ',' << fmt(r.err1_cont) << ','
       << fmt(r.err0_disc) << ',' << fmt(r.err1_disc) << ',' << fmt(r.reformulated_residual)
       << ',' << fmt(r.e_norm) << ',' << fmt(r.e_slow_norm) << '\n';
  }
  return os.str();
}

std::string matrix_txt(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << fmt(m(i, j));
    }
    os << '\n';
  }
  return os.str();
}

std::string vector_txt(const Eigen::VectorXd& v) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < v.size(); ++i) os << fmt(v[i]) << '\n';
  return os.str();
}

nlohmann::ordered_json base_metadata(const ExperimentConfig& cfg, const std::string& command) {
  nlohmann::ordered_json meta;
  meta["code_version"] = kVersion;
  meta["command"] = command;
  meta["config"] = cfg.to_json();
  return meta;
}

void write_metadata(const OutputDir& out, nlohmann::ordered_json meta) {
  out.write("metadata.json", meta.dump(2) + "\n");
}

double convergence_dt(const ExperimentConfig& cfg, double lambda) {
  return std::min(cfg.sweep.dt_max, lambda / 50.0);
}

}  // namespace

RunOutcome run_single(const ExperimentConfig& cfg, const fs::path& out_dir) {
  OutputDir out(out_dir);
  auto mesh = cfg.make_mesh();
  auto scheme = cfg.scheme_config(mesh);
  HermiteState initial = make_initial_state(cfg.case_spec, mesh, cfg.max_mode);

  DiagnosticsCollector collector(cfg.dt);
  std::vector<StepObserver> observers{collector.observer()};

  // Map snapshot times to their nearest step index.
  const long n_steps = static_cast<long>(std::ceil(cfg.t_final / cfg.dt - 1e-9));
  std::vector<std::pair<long, double>> snapshots;
  for (double t : cfg.output.snapshot_times) {
    long step = std::lround(t / cfg.dt);
    snapshots.emplace_back(std::min(std::max(step, 0L), n_steps), t);
  }
  Eigen::VectorXd v_grid(cfg.output.v_grid.count);
  for (int i = 0; i < cfg.output.v_grid.count; ++i)
    v_grid[i] = cfg.output.v_grid.min + (cfg.output.v_grid.max - cfg.output.v_grid.min) * i /
                                            (cfg.output.v_grid.count - 1);
  if (!snapshots.empty()) {
    observers.push_back([&](const StepContext& ctx) {
      for (const auto& [step, t_req] : snapshots) {
        if (ctx.step == step) {
          std::ostringstream name;
          name << "snapshot_t" << t_req << ".txt";
          out.write(name.str(), matrix_txt(reconstruct(ctx.state, v_grid)));
        }
      }
    });
  }

  RunResult result = run(scheme, std::move(initial), observers);

  RunOutcome outcome;
  outcome.diverged = result.diverged;
  outcome.t_end = result.t_end;
  outcome.steps = result.steps_taken;
  outcome.records = collector.records();

  out.write("diagnostics.csv", records_csv(outcome.records));
  if (!snapshots.empty()) {
    out.write("x_axis.txt", vector_txt(mesh->centers()));
    out.write("v_axis.txt", vector_txt(v_grid));
  }

  auto meta = base_metadata(cfg, "run");
  meta["derived"] = {{"n_steps", n_steps},
                     {"quadrature_order", case_quadrature_order(cfg.case_spec, cfg.max_mode)},
                     {"mesh_regularity_ratio", mesh->regularity_ratio()}};
  meta["outcome"] = {{"diverged", outcome.diverged},
                     {"t_end", outcome.t_end},
                     {"steps_taken", outcome.steps},
                     {"energy_anomaly", collector.energy_anomaly()}};
  write_metadata(out, std::move(meta));
  return outcome;
}

ConvergenceResult run_convergence_sweep(const ExperimentConfig& cfg, const fs::path& out_dir) {
  OutputDir out(out_dir);
  if (cfg.sweep.lambdas.empty())
    throw ConfigError("convergence sweep: sweep.lambdas must be nonempty");
  std::vector<double> alphas = cfg.sweep.alphas;
  if (alphas.empty()) alphas = {cfg.case_spec.alpha};

  struct Point {
    double alpha, lambda;
  };
  std::vector<Point> points;
  for (double a : alphas)
    for (double l : cfg.sweep.lambdas) points.push_back({a, l});

  ConvergenceResult result;
  result.rows.resize(points.size());
  std::exception_ptr first_error;

#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(points.size()); ++i) {
    try {
      ExperimentConfig point_cfg = cfg;
      point_cfg.case_spec.alpha = points[i].alpha;
      point_cfg.case_spec.lambda = points[i].lambda;
      point_cfg.dt = convergence_dt(cfg, points[i].lambda);

      auto mesh = point_cfg.make_mesh();
      auto scheme = point_cfg.scheme_config(mesh);
      DiagnosticsCollector collector(point_cfg.dt);
      run(scheme, make_initial_state(point_cfg.case_spec, mesh, point_cfg.max_mode),
          {collector.observer()});

      double m0 = 0.0, m1 = 0.0;
      for (const auto& r : collector.records()) {
        m0 = std::max(m0, r.err0_cont);
        m1 = std::max(m1, r.err1_cont);
      }
      result.rows[i] = {points[i].alpha, points[i].lambda, point_cfg.dt, m0, m1};
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  for (double a : alphas) {
    std::vector<double> ls, e0s, e1s;
    for (const auto& row : result.rows) {
      if (row.alpha == a) {
        ls.push_back(row.lambda);
        e0s.push_back(row.max_err0);
        e1s.push_back(row.max_err1);
      }
    }
    ConvergenceResult::Fit fit;
    fit.alpha = a;
    fit.err0 = fit_slope(ls, e0s);
    fit.err1 = fit_slope(ls, e1s);
    result.fits.push_back(fit);
  }

  std::ostringstream csv;
  csv << "alpha,lambda,dt,max_err0,max_err1\n";
  for (const auto& r : result.rows)
    csv << fmt(r.alpha) << ',' << fmt(r.lambda) << ',' << fmt(r.dt) << ',' << fmt(r.max_err0)
        << ',' << fmt(r.max_err1) << '\n';
  out.write("convergence.csv", csv.str());

  std::ostringstream slopes;
  slopes << "alpha,functional,slope,intercept,r_squared\n";
  for (const auto& f : result.fits) {
    slopes << fmt(f.alpha) << ",err0," << fmt(f.err0.slope) << ',' << fmt(f.err0.intercept) << ','
           << fmt(f.err0.r_squared) << '\n';
    slopes << fmt(f.alpha) << ",err1," << fmt(f.err1.slope) << ',' << fmt(f.err1.intercept) << ','
           << fmt(f.err1.r_squared) << '\n';
  }
  out.write("slopes.csv", slopes.str());

  auto meta = base_metadata(cfg, "convergence");
  nlohmann::ordered_json dts = nlohmann::ordered_json::array();
  for (double l : cfg.sweep.lambdas) dts.push_back({{"lambda", l}, {"dt", convergence_dt(cfg, l)}});
  meta["derived"] = {{"alphas", alphas},
                     {"dt_rule", "min(dt_max, lambda / 50)"},
                     {"dt_by_lambda", dts},
                     {"quadrature_order", case_quadrature_order(cfg.case_spec, cfg.max_mode)}};
  write_metadata(out, std::move(meta));
  return result;
}

ApResult run_ap_sweep(const ExperimentConfig& cfg, const fs::path& out_dir) {
  OutputDir out(out_dir);
  if (cfg.sweep.lambdas.empty()) throw ConfigError("ap sweep: sweep.lambdas must be nonempty");

  ApResult result;
  result.rows.resize(cfg.sweep.lambdas.size());
  std::exception_ptr first_error;

#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(cfg.sweep.lambdas.size()); ++i) {
    try {
      const double lambda = cfg.sweep.lambdas[i];
      ExperimentConfig point_cfg = cfg;
      point_cfg.case_spec.lambda = lambda;

      auto mesh = point_cfg.make_mesh();
      auto scheme = point_cfg.scheme_config(mesh);
      DiagnosticsCollector collector(point_cfg.dt);
      RunResult rr = run(scheme, make_initial_state(point_cfg.case_spec, mesh, point_cfg.max_mode),
                         {collector.observer()});

      ApRow row;
      row.lambda = lambda;
      row.diverged = rr.diverged;
      const auto& recs = collector.records();
      row.sup_err0 = std::numeric_limits<double>::quiet_NaN();
      row.sup_err1 = std::numeric_limits<double>::quiet_NaN();
      for (size_t n = 1; n < recs.size(); ++n) {
        row.sup_err0 = std::isnan(row.sup_err0) ? recs[n].err0_disc
                                                : std::max(row.sup_err0, recs[n].err0_disc);
        if (n >= 2)
          row.sup_err1 = std::isnan(row.sup_err1) ? recs[n].err1_disc
                                                  : std::max(row.sup_err1, recs[n].err1_disc);
      }
      row.ratio0 = row.sup_err0 / lambda;
      row.ratio1 = row.sup_err1 / lambda;
      result.rows[i] = row;
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  std::ostringstream csv;
  csv << "lambda,sup_err0,sup_err1,ratio0,ratio1,diverged\n";
  for (const auto& r : result.rows)
    csv << fmt(r.lambda) << ',' << fmt(r.sup_err0) << ',' << fmt(r.sup_err1) << ','
        << fmt(r.ratio0) << ',' << fmt(r.ratio1) << ',' << (r.diverged ? 1 : 0) << '\n';
  out.write("ap_sweep.csv", csv.str());

  auto meta = base_metadata(cfg, "ap-sweep");
  meta["derived"] = {{"fixed_dt", cfg.dt},
                     {"error_mode", "discrete"},
                     {"quadrature_order", case_quadrature_order(cfg.case_spec, cfg.max_mode)}};
  write_metadata(out, std::move(meta));
  return result;
}

}  // namespace vph
