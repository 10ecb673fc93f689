#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgopt/objective.h"

namespace hgopt {

enum class StepRule { fixed, backtracking };

struct InnerConfig {
  /// Base gradient-norm tolerance; the outer loops tighten it per iteration to
  /// min(grad_tol, tol_schedule_c / t^2).
  double grad_tol = 1e-9;
  double tol_schedule_c = 0.1;
  int max_iters = 10000;
  StepRule step_rule = StepRule::backtracking;
  /// Smoothness constant for the fixed rule; 0 means estimate it over the
  /// sublevel region of the starting point.
  double fixed_L0 = 0.0;
  std::uint64_t seed = 0;
  /// Keep per-iteration values (used by contraction checks and audits).
  bool record_values = false;
};

struct InnerResult {
  explicit InnerResult(ManifoldPoint p) : point(std::move(p)) {}

  ManifoldPoint point;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
  /// Step size 1/L0 used by the fixed rule, or the last accepted step.
  double step = 0.0;
  std::vector<double> values;
  std::vector<ManifoldPoint> iterates;
};

/// Geodesic gradient descent z <- Exp_z(-s grad h(z)) for a strongly
/// g-convex h. Stops at ||grad h|| <= cfg.grad_tol or after max_iters
/// (converged = false). Non-finite values raise NumericalFailure.
InnerResult inner_gd(const Objective& h, const ManifoldPoint& z0, const InnerConfig& cfg);

/// Radii of the sublevel regions D, D0 around z0 and a sampled smoothness
/// constant L0 over D0.
struct SublevelEstimate {
  double radius_d = 0.0;
  double radius_d0 = 0.0;
  double max_grad_d = 0.0;
  double L0 = 0.0;
};

/// Builds D = B(z0, sqrt(2 gap0 / mu)) and D0 = B(z0, r_D + G/mu) with
/// G = max ||grad h|| over D; gap0 is bounded by ||grad h(z0)||^2 / (2 mu)
/// when f* is not supplied.
SublevelEstimate estimate_sublevel(const Objective& h, const ManifoldPoint& z0, Rng& rng,
                                   std::optional<double> min_value = std::nullopt);

/// h(y) = f(y) + d(x, y)^2 / (2 eta), strongly g-convex with mu_f + 1/eta.
Objective prox_subproblem(const Objective& f, const ManifoldPoint& x, double eta);

struct ProxResult {
  ManifoldPoint point;
  int inner_iterations = 0;
  bool converged = false;
  /// ||Exp_y^{-1}(x) - eta grad f(y)||_y at the returned y.
  double residual = 0.0;
};

/// Proximal step: minimizes h via inner_gd warm-started at x, so that
/// x = Exp_y(eta grad f(y)) holds to the inner tolerance.
ProxResult prox_step(const Objective& f, const ManifoldPoint& x, double eta,
                     const InnerConfig& cfg);

enum class ScheduleKind { constant, inv_sqrt, inv_sqrt_log };

/// Outer step sizes: constant eta, c / (2 L sqrt(t)), or 1 / (sqrt(s) log s)
/// with s = t + 1 (log 1 = 0 would make the first step infinite).
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::constant;
  double eta = 1.0;
  double c = 1.0;
  double L = 1.0;

  double at(int t) const;
  void validate() const;
  std::string describe() const;
};

struct SolverConfig {
  StepSchedule schedule;
  int max_outer_iters = 100;
  InnerConfig inner;
  std::uint64_t seed = 0;
  /// Evaluate per-step certificates (telescoping inequality, prox residual).
  bool record_trace = true;
  /// Deterministic runs only: stop once ||grad f|| <= 1e-10. Caps the inner
  /// tolerance at 1e-11 so the threshold is reachable.
  bool early_stop = false;
  /// Fill wall_ms (breaks byte-identical traces).
  bool record_wall_time = false;

  void validate() const;
};

/// Optional reference solution used to fill gaps and distances.
struct Reference {
  ManifoldPoint point;
  double value = 0.0;
};

struct TraceRow {
  int iter = 0;
  double f = 0.0;
  std::optional<double> gap;
  double grad_norm = 0.0;
  std::optional<double> dist_to_opt;
  std::optional<int> inner_iters;
  double eta = 0.0;
  std::optional<double> wall_ms;
};

enum class RunStatus { ok, warning, failure };

struct RunTrace {
  RunTrace(std::string name, ManifoldPoint x0)
      : solver(std::move(name)), start(x0), final_point(std::move(x0)) {}

  std::string solver;
  std::vector<TraceRow> rows;
  ManifoldPoint start;
  ManifoldPoint final_point;
  double f0 = 0.0;
  std::optional<double> dist0;
  RunStatus status = RunStatus::ok;
  std::string message;

  // Deterministic proximal method certificates.
  /// max_t eta t (f(x_t) - f*), compared against d(x0, x*)^2.
  std::optional<double> rate_certificate;
  /// min over steps of <x_t x_{t+1}, x_{t+1} x*> - eta (f(x_{t+1}) - f*).
  std::optional<double> telescoping_slack;
  /// max over steps of prox residual / inner tolerance.
  std::optional<double> max_residual_ratio;
  double max_prox_residual = 0.0;
  /// max over steps of f(x_{t+1}) - f(x_t).
  double max_increase = 0.0;
  int inner_warnings = 0;
  long total_inner_iters = 0;

  // Stochastic method.
  std::vector<std::size_t> samples;
  std::optional<double> weighted_avg_gap;
  double alpha_sum = 0.0;
  /// V_t = sum_s (eta_s - L eta_s^2)(F(x_s) - F*), one entry per step.
  std::vector<double> partial_sums;

  // Explicit RGD baseline.
  std::vector<double> zeta;
  std::optional<double> kappa_lb;
};

/// Deterministic proximal gradient: x_{t+1} = prox_step(f, x_t, eta_t).
RunTrace proximal_gradient(const Objective& f, const ManifoldPoint& x0, const SolverConfig& cfg,
                           const std::optional<Reference>& reference = std::nullopt);

/// Stochastic proximal gradient: sample xi_t, then solve
/// x_t = Exp_{x_{t+1}}(eta_t grad f(x_{t+1}; xi_t)) with prox_step.
/// Alpha weights use alpha_t = 1 / (4 L sqrt(t)) with L = cfg.schedule.L.
RunTrace stochastic_proximal_gradient(const StochasticObjective& F, const ManifoldPoint& x0,
                                      const SolverConfig& cfg,
                                      const std::optional<Reference>& reference = std::nullopt);

/// zeta(kappa, c) = sqrt(|kappa|) c / tanh(sqrt(|kappa|) c), with the limit 1
/// as either argument vanishes.
double zeta(double kappa, double c);

/// Explicit Riemannian gradient descent x_{s+1} = Exp_{x_s}(-eta grad f(x_s)),
/// recording zeta(kappa_lb, d(x_s, x*)) per step when x* is known.
RunTrace rgd_baseline(const Objective& f, const ManifoldPoint& x0, double eta, int T,
                      double kappa_lb, const std::optional<Reference>& reference = std::nullopt);

/// Right-hand side of the averaged stochastic rate:
/// d0^2 / (2 sum alpha) + sigma^2 log(T + 1) / sum alpha.
double stochastic_rate_bound(double dist0, double sigma2, double alpha_sum, int T);

const char* to_string(RunStatus s);

}  // namespace hgopt
