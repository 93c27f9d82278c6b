#include "vph/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "vph/errors.hpp"

namespace vph {

Eigen::VectorXd e_slow(const HermiteState& state) {
  state.basis.validate();
  return std::sqrt(2.0) * state.basis.T0 * dh(*state.mesh, state.coeffs.row(2).transpose());
}

OscillationReference OscillationReference::capture(const HermiteState& state,
                                                   const FieldSolution& field) {
  OscillationReference ref;
  ref.e_minus_eslow0 = field.E - e_slow(state);
  ref.c1_0 = state.coeffs.row(1).transpose();
  ref.lambda = field.lambda;
  ref.T0 = state.basis.T0;
  return ref;
}

OscillatoryParts oscillatory_parts(const OscillationReference& ref, double t) {
  if (t < 0.0) throw ConfigError("oscillatory_parts: t must be >= 0");
  const double c = std::cos(t / ref.lambda);
  const double s = std::sin(t / ref.lambda);
  const double sqrt_T0 = std::sqrt(ref.T0);
  OscillatoryParts parts;
  parts.e_osc = c * ref.e_minus_eslow0 - (sqrt_T0 / ref.lambda) * s * ref.c1_0;
  parts.c1_osc = c * ref.c1_0 + (ref.lambda / sqrt_T0) * s * ref.e_minus_eslow0;
  return parts;
}

ErrorPair error_functionals(const HermiteState& state, const FieldSolution& field,
                            const OscillationReference& ref, double t, ErrorMode mode) {
  const Mesh1D& mesh = *state.mesh;
  ErrorPair out;
  if (mode == ErrorMode::continuous) {
    const auto parts = oscillatory_parts(ref, t);
    out.err0 = l2_norm(mesh, field.E - e_slow(state) - parts.e_osc);
    out.err1 = l2_norm(mesh, state.coeffs.row(1).transpose() - parts.c1_osc);
  } else {
    out.err0 = l2_norm(mesh, field.E - e_slow(state));
    out.err1 = hr_norm(mesh, state.coeffs.row(1).transpose(), 1);
  }
  return out;
}

ConservationReport conservation_report(const HermiteState& state, const FieldSolution& field,
                                       double lambda) {
  const Mesh1D& mesh = *state.mesh;
  ConservationReport rep;
  rep.mass = cell_integral(mesh, state.coeffs.row(0).transpose());
  rep.flux = cell_integral(mesh, state.coeffs.row(1).transpose());
  const Eigen::VectorXd kin = moments(state).kinetic_energy;
  rep.total_energy =
      0.5 * (cell_integral(mesh, kin) + lambda * lambda * mesh.widths().dot(field.E.cwiseAbs2()));
  return rep;
}

double reformulated_residual(const Mesh1D& mesh, const Eigen::VectorXd& e_prev2,
                             const Eigen::VectorXd& e_prev, const Eigen::VectorXd& e_curr,
                             const Eigen::VectorXd& c0_curr, const Eigen::VectorXd& c2_step1,
                             double dt, double lambda, double T0) {
  if (c2_step1.size() != mesh.n_cells())
    throw ConfigError("reformulated_residual: missing intermediate C_2^(1)");
  const double l2 = lambda * lambda;
  const Eigen::VectorXd osc =
      l2 / (dt * dt) * (dh(mesh, e_curr) - 2.0 * dh(mesh, e_prev) + dh(mesh, e_prev2));
  const Eigen::VectorXd advect = dh(mesh, e_curr.cwiseProduct(c0_curr));
  const Eigen::VectorXd source =
      dh(mesh, dh(mesh, std::sqrt(2.0) * T0 * c2_step1 + T0 * c0_curr));
  const Eigen::VectorXd correction =
      l2 * dh(mesh, e_curr.cwiseProduct(dh(mesh, e_curr)) - e_prev.cwiseProduct(dh(mesh, e_prev)));
  return l2_norm(mesh, osc + advect - source - correction);
}

SlopeFit fit_slope(std::span<const double> lambdas, std::span<const double> errors) {
  if (lambdas.size() != errors.size()) throw ConfigError("fit_slope: size mismatch");
  if (lambdas.size() < 3) throw ConfigError("fit_slope: needs at least 3 pairs");
  const auto n = static_cast<double>(lambdas.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || !(errors[i] > 0.0))
      throw ConfigError("fit_slope: values must be positive");
    const double x = std::log(lambdas[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  SlopeFit fit;
  const double den = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double ss_res = syy - sy * sy / n - fit.slope * (sxy - sx * sy / n);
  const double ss_tot = syy - sy * sy / n;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double dominant_period(std::span<const double> t, std::span<const double> value) {
  const size_t n = t.size();
  if (n != value.size()) throw ConfigError("dominant_period: size mismatch");
  if (n < 16) throw ConfigError("dominant_period: series too short");
  const double span = t[n - 1] - t[0];
  if (!(span > 0.0)) throw ConfigError("dominant_period: time span must be positive");
  const double dt0 = t[1] - t[0];
  for (size_t i = 1; i + 1 < n; ++i)
    if (std::abs((t[i + 1] - t[i]) - dt0) > 1e-9 * std::max(1.0, std::abs(dt0)))
      throw ConfigError("dominant_period: series must be uniformly sampled");

  double mean = 0.0;
  for (double v : value) mean += v;
  mean /= static_cast<double>(n);
  double amp = 0.0;
  for (double v : value) amp = std::max(amp, std::abs(v - mean));
  double scale = 0.0;
  for (double v : value) scale = std::max(scale, std::abs(v));
  if (amp <= 1e-14 * std::max(1.0, scale))
    throw ConfigError("dominant_period: series has no oscillation");

  auto power_at = [&](double freq) {
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double ph = 2.0 * M_PI * freq * (t[i] - t[0]);
      const double y = value[i] - mean;
      re += y * std::cos(ph);
      im -= y * std::sin(ph);
    }
    return re * re + im * im;
  };

  // Coarse scan over the Fourier grid, then a dense local scan one bin wide
  // on each side of the peak.
  const size_t half = n / 2;
  size_t best = 1;
  double best_p = -1.0;
  for (size_t m = 1; m <= half; ++m) {
    const double p = power_at(static_cast<double>(m) / span);
    if (p > best_p) {
      best_p = p;
      best = m;
    }
  }
  const double f_lo = (static_cast<double>(best) - 1.0) / span;
  const double f_hi = (static_cast<double>(best) + 1.0) / span;
  const int refine = 2000;
  double f_best = static_cast<double>(best) / span;
  for (int i = 0; i <= refine; ++i) {
    const double f = f_lo + (f_hi - f_lo) * i / refine;
    if (f <= 0.0) continue;
    const double p = power_at(f);
    if (p > best_p) {
      best_p = p;
      f_best = f;
    }
  }
  const double period = 1.0 / f_best;
  if (period > span / 5.0)
    throw ConfigError("dominant_period: series covers fewer than 5 periods");
  return period;
}

DiagnosticsRecord make_record(const HermiteState& state, const FieldSolution& field,
                              const OscillationReference& ref, double t, double residual) {
  const Mesh1D& mesh = *state.mesh;
  DiagnosticsRecord rec;
  rec.t = t;
  rec.potential_energy = 0.5 * mesh.widths().dot(field.E.cwiseAbs2());
  const auto cons = conservation_report(state, field, field.lambda);
  rec.mass = cons.mass;
  rec.flux = cons.flux;
  rec.total_energy = cons.total_energy;
  const auto cont = error_functionals(state, field, ref, t, ErrorMode::continuous);
  rec.err0_cont = cont.err0;
  rec.err1_cont = cont.err1;
  const auto disc = error_functionals(state, field, ref, t, ErrorMode::discrete);
  rec.err0_disc = disc.err0;
  rec.err1_disc = disc.err1;
  rec.reformulated_residual = residual;
  rec.e_norm = l2_norm(mesh, field.E);
  rec.e_slow_norm = l2_norm(mesh, e_slow(state));
  return rec;
}

void DiagnosticsCollector::on_step(const StepContext& ctx) {
  if (ctx.step == 0) {
    ref_ = OscillationReference::capture(ctx.state, ctx.field);
    has_ref_ = true;
    e_window_.clear();
  }
  if (!has_ref_) throw ConfigError("diagnostics: trajectory did not start at step 0");

  double residual = std::numeric_limits<double>::quiet_NaN();
  if (ctx.c2_step1 != nullptr && e_window_.size() == 2) {
    residual = reformulated_residual(*ctx.state.mesh, e_window_[0], e_window_[1], ctx.field.E,
                                     ctx.state.coeffs.row(0).transpose(), *ctx.c2_step1, dt_,
                                     ctx.field.lambda, ctx.state.basis.T0);
  }
  records_.push_back(make_record(ctx.state, ctx.field, ref_, ctx.t, residual));

  e_window_.push_back(ctx.field.E);
  if (e_window_.size() > 2) e_window_.pop_front();
}

StepObserver DiagnosticsCollector::observer() {
  return [this](const StepContext& ctx) { on_step(ctx); };
}

const OscillationReference& DiagnosticsCollector::reference() const {
  if (!has_ref_) throw ConfigError("diagnostics: no reference captured yet");
  return ref_;
}

bool DiagnosticsCollector::energy_anomaly() const {
  for (size_t i = 1; i < records_.size(); ++i) {
    const double dt = records_[i].t - records_[i - 1].t;
    if (dt <= 0.0) continue;
    const double base = std::abs(records_[i - 1].total_energy);
    if (base == 0.0) continue;
    const double growth = (records_[i].total_energy - records_[i - 1].total_energy) / base;
    if (growth > 0.01 * dt) return true;
  }
  return false;
}

}  // namespace vph
