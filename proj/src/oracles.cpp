#include "hgopt/oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "hgopt/errors.h"
#include "hgopt/solvers.h"

namespace hgopt {

TangentVector finite_diff_gradient(const std::function<double(const ManifoldPoint&)>& f,
                                   const Manifold& m, const ManifoldPoint& x, double h,
                                   bool richardson) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ContractViolation("finite_diff: h must be positive");
  m.require_owned(x);
  const std::vector<TangentVector> basis = m.tangent_basis(x);

  auto central = [&](const TangentVector& e, double step) {
    const double fp = f(m.exp(step * e));
    const double fm = f(m.exp(-step * e));
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericalFailure("finite_diff: non-finite evaluation", std::isfinite(fp) ? fm : fp);
    }
    return (fp - fm) / (2.0 * step);
  };

  Vector g = Vector::Zero(m.ambient_size());
  for (const auto& e : basis) {
    double slope = central(e, h);
    if (richardson) slope = (4.0 * central(e, 0.5 * h) - slope) / 3.0;
    g += slope * e.coords();
  }
  return m.tangent(x, g);
}

ReferenceSolution reference_minimize(const Objective& f, const ManifoldPoint& x0,
                                     double certify_tol) {
  const Manifold& m = f.manifold();
  m.require_owned(x0);
  InnerConfig cfg;
  cfg.grad_tol = 1e-13;
  cfg.max_iters = 200000;
  cfg.record_values = true;

  // Merely convex objectives get a vanishing proximal regularizer instead of
  // the strong-convexity guard in inner_gd.
  const Objective* target = &f;
  std::optional<Objective> wrapped;
  if (!(f.mu() > 0.0)) {
    wrapped.emplace(f.manifold_ptr(), [&f](const ManifoldPoint& x) { return f.value(x); },
                    [&f](const ManifoldPoint& x) { return f.gradient(x); }, 1e-6);
    wrapped->with_combined([&f](const ManifoldPoint& x) { return f.value_and_gradient(x); });
    target = &*wrapped;
  }

  ReferenceSolution out(x0);
  ManifoldPoint x = x0;
  double best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 5; ++round) {
    const InnerResult r = inner_gd(*target, x, cfg);
    out.iterations += r.iterations;
    out.trail.insert(out.trail.end(), r.values.begin(), r.values.end());
    x = r.point;
    if (r.grad_norm <= cfg.grad_tol || !(r.grad_norm < best)) {
      best = std::min(best, r.grad_norm);
      break;
    }
    best = r.grad_norm;
  }
  const ValueAndGradient vg = f.value_and_gradient(x);
  out.point = x;
  out.value = vg.value;
  out.certificate = m.norm(vg.gradient);
  if (!(out.certificate <= certify_tol)) {
    throw NumericalFailure("reference_minimize: certificate above tolerance", out.certificate);
  }
  return out;
}

AppendixReport appendix_inequality_check(const Objective& f,
                                         const std::vector<ManifoldPoint>& points, double L,
                                         double mu, double fstar, double tol) {
  if (!(L > 0.0)) throw ContractViolation("appendix: L must be positive");
  if (!(mu >= 0.0)) throw ContractViolation("appendix: mu must be >= 0");
  const Manifold& m = f.manifold();
  AppendixReport rep;
  rep.a2_checked = mu > 0.0;
  rep.worst_a1 = std::numeric_limits<double>::infinity();
  rep.worst_a2 = std::numeric_limits<double>::infinity();
  for (const auto& x : points) {
    const ValueAndGradient vg = f.value_and_gradient(x);
    const double g = m.norm(vg.gradient);
    const double gap = vg.value - fstar;
    const double a1 = gap - g * g / (2.0 * L);
    rep.worst_a1 = std::min(rep.worst_a1, a1);
    bool bad = a1 < -tol;
    if (rep.a2_checked) {
      const double a2 = (2.0 / mu) * g * g - gap;
      rep.worst_a2 = std::min(rep.worst_a2, a2);
      bad = bad || a2 < -tol;
    }
    ++rep.points;
    if (bad) ++rep.violations;
  }
  if (rep.points == 0) rep.worst_a1 = rep.worst_a2 = 0.0;
  if (!rep.a2_checked) rep.worst_a2 = 0.0;
  return rep;
}

}  // namespace hgopt
