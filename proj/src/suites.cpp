#include "hgopt/suites.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "hgopt/errors.h"
#include "hgopt/manifolds.h"
#include "hgopt/oracles.h"
#include "hgopt/properties.h"
#include "hgopt/warped.h"

namespace hgopt {

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; });
}

std::vector<SuiteManifold> suite_manifolds() {
  return {
      {std::make_shared<EuclideanSpace>(5), 2.0},
      {std::make_shared<HyperbolicSpace>(3), 2.0},
      {std::make_shared<SpdManifold>(3), 1.5},
      {std::make_shared<WarpedProduct>(WarpFunction::exp_r2(), Interval{}), 1.0},
  };
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"quasilinear", "geometry", "convexity", "rates",
                                              "appendix"};
  return names;
}

namespace {

bool is_warped(const Manifold& m) { return dynamic_cast<const WarpedProduct*>(&m) != nullptr; }

SuiteCheck upper(std::string name, double worst, double limit) {
  return {std::move(name), worst, limit, "<=", worst <= limit};
}

SuiteCheck lower(std::string name, double worst, double limit) {
  return {std::move(name), worst, limit, ">=", worst >= limit};
}

std::vector<ManifoldPoint> random_points(const Manifold& m, Rng& rng, int n, double radius) {
  std::vector<ManifoldPoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back(m.random_point(rng, radius));
  return pts;
}

SuiteReport quasilinear_suite(const SuiteOptions& o) {
  SuiteReport rep{"quasilinear", {}};
  std::uint64_t stream = 0;
  for (const auto& [m, radius] : suite_manifolds()) {
    Rng rng = make_rng(o.seed, ++stream);
    const QuasiAxiomReport ax = check_quasi_axioms(*m, rng, o.samples, radius);
    const std::string tag = m->name() + " ";
    rep.checks.push_back(upper(tag + "symmetry failures", ax.symmetry_failures, 0));
    rep.checks.push_back(upper(tag + "sign-flip failures", ax.sign_flip_failures, 0));
    rep.checks.push_back(upper(tag + "additivity residual", ax.worst_additivity, 1e-8));
    rep.checks.push_back(upper(tag + "self product error", ax.worst_self, 1e-10));
    const PropertyReport cmp = check_tangent_comparison(*m, rng, o.samples, radius);
    rep.checks.push_back(upper(tag + "quasi - tangent", cmp.worst, 1e-8));
  }
  return rep;
}

SuiteReport geometry_suite(const SuiteOptions& o) {
  SuiteReport rep{"geometry", {}};
  std::uint64_t stream = 100;
  for (const auto& [m, radius] : suite_manifolds()) {
    Rng rng = make_rng(o.seed, ++stream);
    const bool warped = is_warped(*m);
    const std::string tag = m->name() + " ";
    const double max_norm = warped ? 1.5 : 5.0;
    const PropertyReport rt = check_round_trip(*m, rng, o.samples, radius, max_norm,
                                               warped ? 1e-4 : 1e-6);
    rep.checks.push_back(upper(tag + "round trip", rt.worst, warped ? 1e-4 : 1e-6));
    const PropertyReport tr = check_transport_isometry(*m, rng, o.samples, radius);
    rep.checks.push_back(upper(tag + "transport isometry", tr.worst, 1e-8));
    const PropertyReport tc = check_triangle_comparison(*m, rng, o.samples, radius);
    rep.checks.push_back(upper(tag + "triangle comparison", tc.worst, 1e-6));
    const PropertyReport ti = check_triangle_inequality(*m, rng, o.samples, radius);
    rep.checks.push_back(upper(tag + "triangle inequality", ti.worst, 1e-10));
  }
  return rep;
}

SuiteReport convexity_suite(const SuiteOptions& o) {
  SuiteReport rep{"convexity", {}};
  std::uint64_t stream = 200;
  const int n = std::max(10, o.samples / 5);
  for (const auto& [m, radius] : suite_manifolds()) {
    Rng rng = make_rng(o.seed, ++stream);
    const bool warped = is_warped(*m);
    const double grad_tol = warped ? 1e-3 : 1e-4;
    const std::string tag = m->name() + " ";
    const std::vector<ManifoldPoint> anchors = random_points(*m, rng, 5, radius);
    const std::vector<std::pair<std::string, Objective>> objectives{
        {"sqdist", squared_distance_objective(m, anchors.front())},
        {"frechet", frechet_mean_objective(m, anchors)},
    };
    for (const auto& [name, f] : objectives) {
      const PropertyReport g = check_gradient(f, rng, n, radius, grad_tol, warped);
      rep.checks.push_back(upper(tag + name + " gradient rel. error", g.worst, grad_tol));
      const PropertyReport q = check_q_convexity(f, rng, n, radius);
      rep.checks.push_back(lower(tag + name + " q-convexity gap", q.worst, -1e-8));
    }
  }
  return rep;
}

SuiteReport rates_suite(const SuiteOptions& o) {
  SuiteReport rep{"rates", {}};
  auto h2 = std::make_shared<HyperbolicSpace>(2);
  Rng rng = make_rng(o.seed, 300);
  const std::vector<ManifoldPoint> anchors = random_points(*h2, rng, 8, 2.0);
  const Objective f = frechet_mean_objective(h2, anchors);
  const ManifoldPoint x0 = h2->random_point(rng, 2.0);
  const ReferenceSolution ref = reference_minimize(f, x0);
  const Reference reference{ref.point, ref.value};

  for (double eta : {0.1, 0.5, 2.0}) {
    SolverConfig cfg;
    cfg.schedule.eta = eta;
    cfg.max_outer_iters = 200;
    const RunTrace tr = proximal_gradient(f, x0, cfg, reference);
    char tag[64];
    std::snprintf(tag, sizeof tag, "H2 frechet eta=%g ", eta);
    const double d2 = *tr.dist0 * *tr.dist0;
    rep.checks.push_back(upper(std::string(tag) + "max eta*t*gap / d0^2",
                               *tr.rate_certificate / d2, 1.0 + 1e-3));
    rep.checks.push_back(upper(std::string(tag) + "max increase", tr.max_increase, 1e-9));
    rep.checks.push_back(lower(std::string(tag) + "telescoping slack", *tr.telescoping_slack, -1e-7));
    rep.checks.push_back(upper(std::string(tag) + "prox residual / tol", *tr.max_residual_ratio, 10.0));
  }

  // Inner contraction on a prox subproblem, fixed step 1/L0.
  const Objective h = prox_subproblem(f, x0, 0.5);
  const SublevelEstimate est = estimate_sublevel(h, x0, rng);
  const ContractionReport cr = check_contraction(h, x0, est.L0, StepRule::fixed);
  rep.checks.push_back(upper("prox subproblem gap ratio - bound", cr.worst_ratio - cr.bound, 1e-6));

  // Averaged stochastic rate.
  const StochasticObjective F(h2, anchors, o.seed);
  const ReferenceSolution fref = reference_minimize(F.mean(), F.sampling_center());
  const double radius = std::max(F.sampling_radius(), h2->distance(F.sampling_center(), x0));
  Rng lrng = make_rng(o.seed, 301);
  const double L = local_smoothness(F.mean(), F.sampling_center(), radius, lrng);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < 3; ++s) {
    SolverConfig cfg;
    cfg.schedule.kind = ScheduleKind::inv_sqrt;
    cfg.schedule.L = L;
    cfg.max_outer_iters = 500;
    cfg.seed = o.seed + s;
    const RunTrace tr = stochastic_proximal_gradient(F, x0, cfg, Reference{fref.point, fref.value});
    const double bound =
        stochastic_rate_bound(*tr.dist0, F.variance_at(fref.point), tr.alpha_sum, 500);
    worst = std::max(worst, *tr.weighted_avg_gap / bound);
  }
  rep.checks.push_back(upper("stochastic weighted gap / bound", worst, 1.0));
  return rep;
}

SuiteReport appendix_suite(const SuiteOptions& o) {
  SuiteReport rep{"appendix", {}};
  std::uint64_t stream = 400;
  const int n = std::max(10, o.samples / 5);
  for (const auto& [m, radius] : suite_manifolds()) {
    Rng rng = make_rng(o.seed, ++stream);
    const std::vector<ManifoldPoint> anchors = random_points(*m, rng, 5, radius);
    const Objective f = frechet_mean_objective(m, anchors);
    const ReferenceSolution ref = reference_minimize(f, anchors.front());
    const std::vector<ManifoldPoint> pts = random_points(*m, rng, n, radius);
    double reach = 0.0;
    for (const auto& p : pts) reach = std::max(reach, m->distance(ref.point, p));
    for (const auto& a : anchors) reach = std::max(reach, m->distance(ref.point, a));
    const double L = f.smoothness() ? *f.smoothness() : local_smoothness(f, ref.point, reach, rng);
    const AppendixReport ar = appendix_inequality_check(f, pts, L, f.mu(), ref.value);
    const std::string tag = m->name() + " frechet ";
    rep.checks.push_back(lower(tag + "A1 slack", ar.worst_a1, -1e-8));
    rep.checks.push_back(lower(tag + "A2 slack", ar.worst_a2, -1e-8));
  }
  return rep;
}

}  // namespace

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
  if (name == "quasilinear") return quasilinear_suite(opts);
  if (name == "geometry") return geometry_suite(opts);
  if (name == "convexity") return convexity_suite(opts);
  if (name == "rates") return rates_suite(opts);
  if (name == "appendix") return appendix_suite(opts);
  throw ContractViolation("unknown suite '" + name + "'");
}

bool print_report(const SuiteReport& report, std::ostream& out) {
  out << "[" << report.suite << "]\n";
  for (const SuiteCheck& c : report.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-4s %-52s worst=% .6e  (%s %.1e)\n",
                  c.pass ? "ok" : "FAIL", c.name.c_str(), c.worst, c.relation.c_str(), c.limit);
    out << line;
  }
  out << "  suite " << report.suite << ": " << (report.pass() ? "pass" : "FAIL") << "\n";
  return report.pass();
}

}  // namespace hgopt
