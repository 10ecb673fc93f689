#include "hgopt/solvers.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "hgopt/errors.h"
#include "hgopt/quasilinear.h"

namespace hgopt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(const ValueAndGradient& vg, const char* where) {
  if (!std::isfinite(vg.value) || !vg.gradient.coords().allFinite()) {
    throw NumericalFailure(std::string(where) + ": non-finite objective or gradient",
                           vg.value);
  }
}

constexpr double kEarlyStopTol = 1e-10;

double inner_tolerance(const InnerConfig& cfg, int t) {
  const double tt = static_cast<double>(t);
  return std::min(cfg.grad_tol, cfg.tol_schedule_c / (tt * tt));
}

}  // namespace

InnerResult inner_gd(const Objective& h, const ManifoldPoint& z0, const InnerConfig& cfg) {
  const Manifold& m = h.manifold();
  m.require_owned(z0);
  if (!(h.mu() > 0.0)) throw ContractViolation("inner_gd: objective must be strongly convex");
  if (!(cfg.grad_tol > 0.0)) throw ContractViolation("inner_gd: grad_tol must be positive");
  if (cfg.max_iters < 0) throw ContractViolation("inner_gd: max_iters must be >= 0");

  InnerResult out(z0);
  ValueAndGradient cur = h.value_and_gradient(z0);
  require_finite(cur, "inner_gd");
  double gn = m.norm(cur.gradient);
  auto record = [&](const ManifoldPoint& z, double v) {
    if (!cfg.record_values) return;
    out.values.push_back(v);
    out.iterates.push_back(z);
  };
  record(out.point, cur.value);

  const double max_step = 1.0 / h.mu();
  double step = max_step;
  if (cfg.step_rule == StepRule::fixed) {
    double L0 = cfg.fixed_L0;
    if (L0 <= 0.0) {
      Rng rng = make_rng(cfg.seed, 0x1d0);
      L0 = estimate_sublevel(h, z0, rng, h.min_value()).L0;
    }
    step = 1.0 / L0;
  }
  out.step = step;

  while (gn > cfg.grad_tol && out.iterations < cfg.max_iters) {
    if (cfg.step_rule == StepRule::fixed) {
      out.point = m.exp(-step * cur.gradient);
      cur = h.value_and_gradient(out.point);
      require_finite(cur, "inner_gd");
    } else {
      bool accepted = false;
      for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
        const ManifoldPoint trial = m.exp(-step * cur.gradient);
        ValueAndGradient next = h.value_and_gradient(trial);
        require_finite(next, "inner_gd");
        const double decrease = cur.value - next.value;
        bool ok = decrease >= 0.5 * step * gn * gn;
        if (!ok) {
          // Once the predicted decrease drops below the rounding level of h,
          // value comparisons are noise; fall back to gradient progress.
          const double noise = 8.0 * kEps * std::max(std::abs(cur.value), 1.0);
          ok = 0.5 * step * gn * gn <= noise && decrease >= -noise &&
               m.norm(next.gradient) < gn;
        }
        if (ok) {
          out.point = trial;
          cur = std::move(next);
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      out.step = step;
      step = std::min(2.0 * step, max_step);
    }
    gn = m.norm(cur.gradient);
    ++out.iterations;
    record(out.point, cur.value);
  }
  out.grad_norm = gn;
  out.converged = gn <= cfg.grad_tol;
  return out;
}

SublevelEstimate estimate_sublevel(const Objective& h, const ManifoldPoint& z0, Rng& rng,
                                   std::optional<double> min_value) {
  const Manifold& m = h.manifold();
  const double mu = h.mu();
  if (!(mu > 0.0)) throw ContractViolation("estimate_sublevel: objective must be strongly convex");
  const ValueAndGradient vg = h.value_and_gradient(z0);
  const double g0 = m.norm(vg.gradient);
  double gap0 = g0 * g0 / (2.0 * mu);
  if (min_value) gap0 = std::max(0.0, std::min(gap0, vg.value - *min_value));

  SublevelEstimate est;
  // The sublevel set of z0 lies in B(x*, sqrt(2 gap0 / mu)), which contains z0.
  est.radius_d = 2.0 * std::sqrt(2.0 * gap0 / mu);
  est.max_grad_d = g0;
  constexpr int kSamples = 200;
  for (int k = 0; k < kSamples && est.radius_d > 0.0; ++k) {
    const ManifoldPoint p = m.exp(m.random_tangent(rng, z0, est.radius_d));
    est.max_grad_d = std::max(est.max_grad_d, m.norm(h.gradient(p)));
  }
  est.radius_d0 = est.radius_d + est.max_grad_d / mu;
  est.L0 = local_smoothness(h, z0, est.radius_d0, rng);
  return est;
}

Objective prox_subproblem(const Objective& f, const ManifoldPoint& x, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ContractViolation("prox: eta must be positive and finite");
  }
  f.manifold().require_owned(x);
  const Manifold* m = &f.manifold();
  const double inv = 1.0 / eta;
  auto combined = [f, x, m, inv](const ManifoldPoint& y) {
    ValueAndGradient vg = f.value_and_gradient(y);
    const TangentVector toward = m->log(y, x);
    const double d = m->norm(toward);
    vg.value += 0.5 * inv * d * d;
    vg.gradient = vg.gradient - inv * toward;
    return vg;
  };
  auto value = [combined](const ManifoldPoint& y) { return combined(y).value; };
  auto gradient = [combined](const ManifoldPoint& y) { return combined(y).gradient; };
  Objective h(f.manifold_ptr(), value, gradient, f.mu() + inv);
  h.with_combined(combined);
  return h;
}

ProxResult prox_step(const Objective& f, const ManifoldPoint& x, double eta,
                     const InnerConfig& cfg) {
  const Objective h = prox_subproblem(f, x, eta);
  InnerConfig inner = cfg;
  inner.record_values = false;
  const InnerResult r = inner_gd(h, x, inner);
  const Manifold& m = f.manifold();
  ProxResult out{r.point, r.iterations, r.converged, 0.0};
  const TangentVector lhs = m.log(r.point, x);
  const TangentVector rhs = eta * f.gradient(r.point);
  out.residual = m.norm(lhs - rhs);
  return out;
}

double StepSchedule::at(int t) const {
  if (t < 1) throw ContractViolation("schedule: iteration index starts at 1");
  const double tt = static_cast<double>(t);
  switch (kind) {
    case ScheduleKind::constant:
      return eta;
    case ScheduleKind::inv_sqrt:
      return c / (2.0 * L * std::sqrt(tt));
    case ScheduleKind::inv_sqrt_log: {
      const double s = tt + 1.0;
      return 1.0 / (std::sqrt(s) * std::log(s));
    }
  }
  throw ContractViolation("schedule: unknown kind");
}

void StepSchedule::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  switch (kind) {
    case ScheduleKind::constant:
      if (!positive(eta)) throw ContractViolation("schedule: eta must be positive and finite");
      break;
    case ScheduleKind::inv_sqrt:
      if (!positive(c) || !positive(L)) {
        throw ContractViolation("schedule: c and L must be positive and finite");
      }
      break;
    case ScheduleKind::inv_sqrt_log:
      if (!positive(L)) throw ContractViolation("schedule: L must be positive and finite");
      break;
  }
}

std::string StepSchedule::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ScheduleKind::constant:
      os << "constant(eta=" << eta << ")";
      break;
    case ScheduleKind::inv_sqrt:
      os << "inv_sqrt(c=" << c << ",L=" << L << ")";
      break;
    case ScheduleKind::inv_sqrt_log:
      os << "inv_sqrt_log";
      break;
  }
  return os.str();
}

void SolverConfig::validate() const {
  schedule.validate();
  if (max_outer_iters < 1) throw ContractViolation("solver: max_outer_iters must be >= 1");
  if (!(inner.grad_tol > 0.0)) throw ContractViolation("solver: inner grad_tol must be positive");
  if (!(inner.tol_schedule_c > 0.0)) {
    throw ContractViolation("solver: inner tolerance schedule constant must be positive");
  }
  if (inner.max_iters < 1) throw ContractViolation("solver: inner max_iters must be >= 1");
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void fill_reference(const Manifold& m, const std::optional<Reference>& ref,
                    const ManifoldPoint& x, double fx, TraceRow& row) {
  if (!ref) return;
  row.gap = fx - ref->value;
  row.dist_to_opt = m.distance(x, ref->point);
}

RunTrace start_trace(const char* solver, const Objective& f, const ManifoldPoint& x0,
                     const std::optional<Reference>& ref) {
  const Manifold& m = f.manifold();
  m.require_owned(x0);
  if (ref) m.require_owned(ref->point);
  RunTrace trace(solver, x0);
  trace.f0 = f.value(x0);
  if (ref) trace.dist0 = m.distance(x0, ref->point);
  return trace;
}

}  // namespace

RunTrace proximal_gradient(const Objective& f, const ManifoldPoint& x0, const SolverConfig& cfg,
                           const std::optional<Reference>& reference) {
  cfg.validate();
  const Manifold& m = f.manifold();
  RunTrace trace = start_trace("proximal_gradient", f, x0, reference);
  const auto t0 = Clock::now();

  ManifoldPoint x = x0;
  double fx = trace.f0;
  double eta_sum = 0.0;
  for (int t = 1; t <= cfg.max_outer_iters; ++t) {
    const double eta = cfg.schedule.at(t);
    InnerConfig inner = cfg.inner;
    inner.grad_tol = inner_tolerance(cfg.inner, t);
    if (cfg.early_stop) inner.grad_tol = std::min(inner.grad_tol, 0.1 * kEarlyStopTol);
    inner.seed = cfg.seed;
    const ProxResult pr = prox_step(f, x, eta, inner);
    if (!pr.converged) {
      ++trace.inner_warnings;
      trace.status = RunStatus::warning;
    }
    trace.total_inner_iters += pr.inner_iterations;
    eta_sum += eta;

    const ValueAndGradient vg = f.value_and_gradient(pr.point);
    require_finite(vg, "proximal_gradient");
    TraceRow row;
    row.iter = t;
    row.f = vg.value;
    row.grad_norm = m.norm(vg.gradient);
    row.inner_iters = pr.inner_iterations;
    row.eta = eta;

    trace.max_increase = t == 1 ? vg.value - fx : std::max(trace.max_increase, vg.value - fx);
    trace.max_prox_residual = std::max(trace.max_prox_residual, pr.residual);
    if (cfg.record_trace) {
      const double ratio = pr.residual / inner.grad_tol;
      trace.max_residual_ratio = std::max(trace.max_residual_ratio.value_or(0.0), ratio);
    }
    if (reference) {
      DistanceCache cache(m);
      row.gap = vg.value - reference->value;
      row.dist_to_opt = cache.distance(pr.point, reference->point);
      trace.rate_certificate = std::max(trace.rate_certificate.value_or(-1.0), eta_sum * *row.gap);
      if (cfg.record_trace) {
        const double q =
            quasi_inner(cache, {x, pr.point}, {pr.point, reference->point}).value;
        const double slack = q - eta * *row.gap;
        trace.telescoping_slack = std::min(trace.telescoping_slack.value_or(slack), slack);
      }
    }
    if (cfg.record_wall_time) row.wall_ms = elapsed_ms(t0);
    trace.rows.push_back(row);

    x = pr.point;
    fx = vg.value;
    if (cfg.early_stop && row.grad_norm <= kEarlyStopTol) break;
  }
  trace.final_point = x;
  if (trace.inner_warnings > 0) {
    trace.message = std::to_string(trace.inner_warnings) + " inner solves hit max_iters";
  }
  return trace;
}

RunTrace stochastic_proximal_gradient(const StochasticObjective& F, const ManifoldPoint& x0,
                                      const SolverConfig& cfg,
                                      const std::optional<Reference>& reference) {
  cfg.validate();
  const Manifold& m = F.manifold();
  RunTrace trace = start_trace("stochastic_proximal_gradient", F.mean(), x0, reference);
  const auto t0 = Clock::now();
  Rng rng = make_rng(cfg.seed, 0x5a11);
  const double L = cfg.schedule.L;

  ManifoldPoint x = x0;
  double weighted_gap = 0.0;
  double partial = 0.0;
  for (int t = 1; t <= cfg.max_outer_iters; ++t) {
    const std::size_t xi = F.sample(rng);
    trace.samples.push_back(xi);
    const double eta = cfg.schedule.at(t);
    InnerConfig inner = cfg.inner;
    inner.grad_tol = inner_tolerance(cfg.inner, t);
    inner.seed = cfg.seed;
    const ProxResult pr = prox_step(F.component_objective(xi), x, eta, inner);
    if (!pr.converged) {
      ++trace.inner_warnings;
      trace.status = RunStatus::warning;
    }
    trace.total_inner_iters += pr.inner_iterations;
    trace.max_prox_residual = std::max(trace.max_prox_residual, pr.residual);
    if (cfg.record_trace) {
      const double ratio = pr.residual / inner.grad_tol;
      trace.max_residual_ratio = std::max(trace.max_residual_ratio.value_or(0.0), ratio);
    }

    const ValueAndGradient vg = F.mean().value_and_gradient(pr.point);
    require_finite(vg, "stochastic_proximal_gradient");
    TraceRow row;
    row.iter = t;
    row.f = vg.value;
    row.grad_norm = m.norm(vg.gradient);
    row.inner_iters = pr.inner_iterations;
    row.eta = eta;
    fill_reference(m, reference, pr.point, vg.value, row);

    const double alpha = 1.0 / (4.0 * L * std::sqrt(static_cast<double>(t)));
    trace.alpha_sum += alpha;
    if (row.gap) {
      weighted_gap += alpha * *row.gap;
      partial += (eta - L * eta * eta) * *row.gap;
      trace.partial_sums.push_back(partial);
    }
    if (cfg.record_wall_time) row.wall_ms = elapsed_ms(t0);
    trace.rows.push_back(row);
    x = pr.point;
  }
  trace.final_point = x;
  if (reference) trace.weighted_avg_gap = weighted_gap / trace.alpha_sum;
  if (trace.inner_warnings > 0) {
    trace.message = std::to_string(trace.inner_warnings) + " inner solves hit max_iters";
  }
  return trace;
}

double zeta(double kappa, double c) {
  if (!(kappa <= 0.0)) throw ContractViolation("zeta: curvature bound must be <= 0");
  if (!(c >= 0.0)) throw ContractViolation("zeta: distance must be >= 0");
  const double a = std::sqrt(-kappa) * c;
  if (a < 1e-8) return 1.0 + a * a / 3.0;
  return a / std::tanh(a);
}

RunTrace rgd_baseline(const Objective& f, const ManifoldPoint& x0, double eta, int T,
                      double kappa_lb, const std::optional<Reference>& reference) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ContractViolation("rgd: eta must be positive and finite");
  }
  if (T < 1) throw ContractViolation("rgd: T must be >= 1");
  if (!(kappa_lb <= 0.0)) throw ContractViolation("rgd: curvature bound must be <= 0");
  const Manifold& m = f.manifold();
  RunTrace trace = start_trace("rgd", f, x0, reference);
  trace.kappa_lb = kappa_lb;

  ManifoldPoint x = x0;
  ValueAndGradient vg = f.value_and_gradient(x);
  require_finite(vg, "rgd");
  for (int t = 1; t <= T; ++t) {
    x = m.exp(-eta * vg.gradient);
    const double prev = vg.value;
    vg = f.value_and_gradient(x);
    require_finite(vg, "rgd");
    TraceRow row;
    row.iter = t;
    row.f = vg.value;
    row.grad_norm = m.norm(vg.gradient);
    row.eta = eta;
    fill_reference(m, reference, x, vg.value, row);
    if (row.dist_to_opt) trace.zeta.push_back(zeta(kappa_lb, *row.dist_to_opt));
    trace.max_increase = t == 1 ? vg.value - prev : std::max(trace.max_increase, vg.value - prev);
    trace.rows.push_back(row);
  }
  trace.final_point = x;
  return trace;
}

double stochastic_rate_bound(double dist0, double sigma2, double alpha_sum, int T) {
  if (!(alpha_sum > 0.0)) throw ContractViolation("rate bound: alpha sum must be positive");
  return dist0 * dist0 / (2.0 * alpha_sum) +
         sigma2 * std::log(static_cast<double>(T) + 1.0) / alpha_sum;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok:
      return "ok";
    case RunStatus::warning:
      return "warning";
    case RunStatus::failure:
      return "failure";
  }
  return "unknown";
}

}  // namespace hgopt
