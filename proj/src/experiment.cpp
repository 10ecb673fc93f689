#include "hgopt/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "hgopt/manifolds.h"
#include "hgopt/warped.h"

namespace hgopt {

namespace {

// RNG streams derived from each seed.
constexpr std::uint64_t kAnchorStream = 1;
constexpr std::uint64_t kStartStream = 2;
constexpr std::uint64_t kSmoothnessStream = 3;

ManifoldPoint point_from(const Manifold& m, const std::vector<double>& coords,
                         const std::string& what) {
  if (static_cast<int>(coords.size()) != m.ambient_size()) {
    throw ConfigError(what + " has " + std::to_string(coords.size()) + " coordinates, " +
                          m.name() + " expects " + std::to_string(m.ambient_size()),
                      0);
  }
  Vector v(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) v(static_cast<Eigen::Index>(i)) = coords[i];
  try {
    return m.point(v);
  } catch (const ContractViolation& e) {
    throw ConfigError(what + ": " + e.what(), 0);
  }
}

/// Parallel for over [0, n) with at most `jobs` threads; the first exception
/// thrown by any task is rethrown after all threads finish.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex guard;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(guard);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace

std::shared_ptr<const Manifold> build_manifold(const ManifoldSpec& spec) {
  try {
    if (spec.type == "euclidean") return std::make_shared<EuclideanSpace>(spec.dim);
    if (spec.type == "hyperbolic") return std::make_shared<HyperbolicSpace>(spec.dim, spec.curvature);
    if (spec.type == "spd") return std::make_shared<SpdManifold>(spec.n);
    if (spec.type == "warped") {
      Interval iv;
      if (spec.phi == "t2") iv = Interval{0.0, 1.0};
      if (spec.lo) iv.lo = *spec.lo;
      if (spec.hi) iv.hi = *spec.hi;
      return std::make_shared<WarpedProduct>(WarpFunction::by_name(spec.phi), iv);
    }
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("manifold: ") + e.what(), 0);
  }
  throw ConfigError("unknown manifold type '" + spec.type + "'", 0);
}

double curvature_lower_bound(const Manifold& m, const std::vector<ManifoldPoint>& points) {
  if (dynamic_cast<const EuclideanSpace*>(&m) != nullptr) return 0.0;
  if (const auto* h = dynamic_cast<const HyperbolicSpace*>(&m)) return h->curvature();
  // Sectional curvatures of the affine-invariant metric lie in [-1/2, 0].
  if (dynamic_cast<const SpdManifold*>(&m) != nullptr) return -0.5;
  if (const auto* w = dynamic_cast<const WarpedProduct*>(&m)) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : points) {
      lo = std::min(lo, p.coords()(0));
      hi = std::max(hi, p.coords()(0));
    }
    if (points.empty()) lo = hi = w->origin().coords()(0);
    const Interval& dom = w->interval();
    constexpr double kMargin = 0.5;
    Interval region{lo - kMargin, hi + kMargin};
    if (std::isfinite(dom.lo)) region.lo = std::max(region.lo, dom.lo + 1e-3 * (hi - dom.lo + 1e-3));
    if (std::isfinite(dom.hi)) region.hi = std::min(region.hi, dom.hi - 1e-3 * (dom.hi - lo + 1e-3));
    return w->sectional_curvature_bound(region);
  }
  throw ContractViolation("curvature_lower_bound: unsupported manifold " + m.name());
}

Problem build_problem(const ExperimentConfig& cfg, std::shared_ptr<const Manifold> manifold,
                      std::uint64_t seed) {
  const Manifold& m = *manifold;
  const ObjectiveSpec& os = cfg.objective;
  std::vector<ManifoldPoint> anchors;
  if (!os.anchors.empty()) {
    for (std::size_t i = 0; i < os.anchors.size(); ++i) {
      anchors.push_back(point_from(m, os.anchors[i], "anchor " + std::to_string(i)));
    }
  } else {
    Rng rng = make_rng(seed, kAnchorStream);
    for (int i = 0; i < os.num_anchors; ++i) anchors.push_back(m.random_point(rng, os.anchor_radius));
  }

  ManifoldPoint start = m.origin();
  if (!cfg.start.coords.empty()) {
    start = point_from(m, cfg.start.coords, "start");
  } else {
    Rng rng = make_rng(seed, kStartStream);
    start = m.random_point(rng, cfg.start.radius);
  }

  std::optional<StochasticObjective> stochastic;
  Objective objective = os.type == "sqdist"
                            ? squared_distance_objective(manifold, anchors.front())
                            : frechet_mean_objective(manifold, anchors, os.weights);
  const bool wants_stochastic =
      std::any_of(cfg.solvers.begin(), cfg.solvers.end(),
                  [](const SolverSpec& s) { return s.name == "stochastic_proximal_gradient"; });
  if (wants_stochastic || os.type == "stochastic_frechet") {
    stochastic.emplace(manifold, anchors, seed);
  }

  Problem p{manifold, std::move(objective), std::move(stochastic), start, std::nullopt};
  if (cfg.reference) p.reference = reference_minimize(p.objective, start);
  return p;
}

CellResult run_cell(const SolverSpec& spec, const Problem& problem, std::uint64_t seed,
                    bool record_wall_time) {
  CellResult cell;
  cell.label = spec.label;
  cell.solver = spec.name;
  cell.seed = seed;
  const Manifold& m = *problem.manifold;
  std::optional<Reference> ref;
  if (problem.reference) ref = Reference{problem.reference->point, problem.reference->value};

  try {
    SolverConfig sc;
    sc.schedule = spec.schedule;
    sc.max_outer_iters = spec.T;
    sc.inner = spec.inner;
    sc.seed = seed;
    sc.early_stop = spec.early_stop;
    sc.record_wall_time = record_wall_time;

    if (spec.name == "proximal_gradient") {
      if (spec.estimate_L) {
        Rng rng = make_rng(seed, kSmoothnessStream);
        const double radius = std::max(1e-3, 2.0 * m.distance(problem.start, ref ? ref->point : problem.start));
        sc.schedule.L = local_smoothness(problem.objective, problem.start, radius, rng);
      }
      RunTrace tr = proximal_gradient(problem.objective, problem.start, sc, ref);
      if (ref && tr.dist0) {
        cell.rate_bound = *tr.dist0 * *tr.dist0;
        if (*tr.rate_certificate > *cell.rate_bound * (1.0 + 1e-3)) {
          cell.violations.push_back("rate");
        }
        if (tr.telescoping_slack && *tr.telescoping_slack < -1e-7) {
          cell.violations.push_back("telescoping");
        }
      }
      if (tr.max_increase > 1e-9) cell.violations.push_back("monotone");
      if (tr.max_residual_ratio && *tr.max_residual_ratio > 10.0) {
        cell.violations.push_back("prox_residual");
      }
      cell.trace = std::move(tr);
    } else if (spec.name == "stochastic_proximal_gradient") {
      const StochasticObjective& F = *problem.stochastic;
      if (spec.estimate_L) {
        Rng rng = make_rng(seed, kSmoothnessStream);
        const double radius =
            std::max(F.sampling_radius(), m.distance(F.sampling_center(), problem.start));
        sc.schedule.L = local_smoothness(F.mean(), F.sampling_center(), radius, rng);
      }
      RunTrace tr = stochastic_proximal_gradient(F, problem.start, sc, ref);
      if (ref && tr.dist0 && tr.weighted_avg_gap) {
        if (sc.schedule.kind == ScheduleKind::inv_sqrt && sc.schedule.c == 1.0) {
          const double sigma2 = F.variance_at(ref->point);
          cell.stochastic_bound = stochastic_rate_bound(*tr.dist0, sigma2, tr.alpha_sum, spec.T);
          if (*tr.weighted_avg_gap > *cell.stochastic_bound) cell.violations.push_back("rate1");
        }
        if (sc.schedule.kind == ScheduleKind::inv_sqrt_log && tr.partial_sums.size() >= 2) {
          const auto& v = tr.partial_sums;
          const double inc = std::abs(v.back() - v[v.size() - 2]);
          cell.partial_sum_increment = inc / std::max(std::abs(v.back()), 1e-300);
          if (*cell.partial_sum_increment >= 0.01) cell.violations.push_back("summability");
        }
      }
      if (tr.max_residual_ratio && *tr.max_residual_ratio > 10.0) {
        cell.violations.push_back("prox_residual");
      }
      cell.trace = std::move(tr);
    } else {
      std::vector<ManifoldPoint> pts = problem.objective.anchors();
      pts.push_back(problem.start);
      if (ref) pts.push_back(ref->point);
      const double kappa = spec.kappa_lb ? *spec.kappa_lb : curvature_lower_bound(m, pts);
      cell.trace = rgd_baseline(problem.objective, problem.start, spec.schedule.eta, spec.T,
                                kappa, ref);
    }
    cell.message = cell.trace->message;
  } catch (const NumericalFailure& e) {
    cell.numerical_failure = true;
    cell.message = e.what();
  } catch (const DomainExitError& e) {
    cell.numerical_failure = true;
    cell.message = e.what();
  }
  return cell;
}

std::string format_double(std::optional<double> v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

void write_trace_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "iter,f,gap,grad_norm,dist_to_opt,inner_iters,eta,wall_ms\n";
  for (const TraceRow& r : trace.rows) {
    out << r.iter << ',' << format_double(r.f) << ',' << format_double(r.gap) << ','
        << format_double(r.grad_norm) << ',' << format_double(r.dist_to_opt) << ','
        << (r.inner_iters ? std::to_string(*r.inner_iters) : "") << ','
        << format_double(r.eta) << ',' << format_double(r.wall_ms) << '\n';
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string resolve_output_dir(const std::string& flag, const ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("HGOPT_OUT"); env != nullptr && *env != '\0') return env;
  return "hgopt_out";
}

namespace {

std::string csv_name(const CellResult& c) {
  return c.label + "_seed" + std::to_string(c.seed) + ".csv";
}

struct GridResult {
  std::vector<CellResult> cells;
  int exit_code = kExitOk;
};

GridResult run_grid(ExperimentConfig& cfg, const RunOptions& opts, const std::string& dir,
                    std::ostream& log) {
  if (opts.seed_override) cfg.seeds = {*opts.seed_override};
  const auto manifold = build_manifold(cfg.manifold);
  std::filesystem::create_directories(dir);

  const std::size_t nseeds = cfg.seeds.size();
  std::vector<std::optional<Problem>> problems(nseeds);
  std::vector<std::string> problem_errors(nseeds);
  parallel_for(nseeds, opts.jobs, [&](std::size_t i) {
    try {
      problems[i] = build_problem(cfg, manifold, cfg.seeds[i]);
    } catch (const NumericalFailure& e) {
      problem_errors[i] = e.what();
    } catch (const DomainExitError& e) {
      problem_errors[i] = e.what();
    }
  });

  const std::size_t nsolvers = cfg.solvers.size();
  GridResult grid;
  grid.cells.resize(nseeds * nsolvers);
  parallel_for(grid.cells.size(), opts.jobs, [&](std::size_t k) {
    const std::size_t si = k / nsolvers;
    const SolverSpec& spec = cfg.solvers[k % nsolvers];
    CellResult& cell = grid.cells[k];
    if (!problems[si]) {
      cell.label = spec.label;
      cell.solver = spec.name;
      cell.seed = cfg.seeds[si];
      cell.numerical_failure = true;
      cell.message = "setup failed: " + problem_errors[si];
      return;
    }
    cell = run_cell(spec, *problems[si], cfg.seeds[si], cfg.record_wall_time);
    if (cell.trace) write_trace_csv((std::filesystem::path(dir) / csv_name(cell)).string(), *cell.trace);
  });

  std::ofstream summary((std::filesystem::path(dir) / "summary.csv").string(),
                        std::ios::binary | std::ios::trunc);
  summary << "label,solver,seed,status,iterations,final_f,final_gap,dist0,rate_certificate,"
             "rate_bound,telescoping_slack,max_residual_ratio,max_increase,weighted_avg_gap,"
             "stochastic_bound,partial_sum_increment,inner_iters,pass,message\n";
  bool any_violation = false;
  bool any_failure = false;
  for (const CellResult& c : grid.cells) {
    std::string status = "failure";
    std::optional<double> final_f, final_gap, increase, dist0, rate, tele, resid, avg;
    std::string iters, inner;
    if (c.trace) {
      const RunTrace& t = *c.trace;
      status = to_string(t.status);
      iters = std::to_string(t.rows.size());
      if (!t.rows.empty()) {
        final_f = t.rows.back().f;
        final_gap = t.rows.back().gap;
      }
      dist0 = t.dist0;
      rate = t.rate_certificate;
      tele = t.telescoping_slack;
      resid = t.max_residual_ratio;
      increase = t.max_increase;
      avg = t.weighted_avg_gap;
      if (t.solver != "rgd") inner = std::to_string(t.total_inner_iters);
    }
    const bool pass = !c.numerical_failure && c.violations.empty();
    any_violation = any_violation || !c.violations.empty();
    any_failure = any_failure || c.numerical_failure;
    std::string message = c.message;
    if (!c.violations.empty()) {
      std::string v;
      for (const auto& s : c.violations) v += (v.empty() ? "" : ";") + s;
      message = "violated: " + v + (message.empty() ? "" : "; " + message);
    }
    std::replace(message.begin(), message.end(), ',', ';');
    std::replace(message.begin(), message.end(), '\n', ' ');
    summary << c.label << ',' << c.solver << ',' << c.seed << ',' << status << ',' << iters << ','
            << format_double(final_f) << ',' << format_double(final_gap) << ','
            << format_double(dist0) << ',' << format_double(rate) << ','
            << format_double(c.rate_bound) << ',' << format_double(tele) << ','
            << format_double(resid) << ',' << format_double(increase) << ','
            << format_double(avg) << ',' << format_double(c.stochastic_bound) << ','
            << format_double(c.partial_sum_increment) << ',' << inner << ','
            << (pass ? "true" : "false") << ',' << message << '\n';
    log << c.label << " seed=" << c.seed << ": " << (pass ? "pass" : "FAIL")
        << (message.empty() ? "" : " (" + message + ")") << '\n';
  }
  if (any_failure) {
    grid.exit_code = kExitNumerical;
  } else if (any_violation) {
    grid.exit_code = kExitViolation;
  }
  return grid;
}

std::string not_required() { return "not required"; }

}  // namespace

int cmd_run(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log) {
  const std::string dir = resolve_output_dir(opts.output_dir, cfg);
  const GridResult grid = run_grid(cfg, opts, dir, log);
  log << "wrote " << grid.cells.size() << " run(s) to " << dir << '\n';
  return grid.exit_code;
}

int cmd_bench(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log) {
  if (cfg.solvers.size() < 2) {
    throw ConfigError("bench needs at least two solvers in the config", 0);
  }
  const std::string dir = resolve_output_dir(opts.output_dir, cfg);
  const GridResult grid = run_grid(cfg, opts, dir, log);

  std::ofstream table((std::filesystem::path(dir) / "bench.csv").string(),
                      std::ios::binary | std::ios::trunc);
  table << "label,solver,seed,final_gap,iters_to_eps,inner_cost,zeta,curvature_lb\n";
  log << std::left << std::setw(28) << "solver" << std::setw(8) << "seed" << std::setw(14)
      << "final_gap" << std::setw(14) << "iters_to_eps" << std::setw(12) << "inner_cost"
      << std::setw(14) << "zeta" << "curvature_lb\n";
  for (const CellResult& c : grid.cells) {
    std::string gap = "", to_eps = "", inner = "", zeta_col, kappa_col;
    if (c.trace) {
      const RunTrace& t = *c.trace;
      if (!t.rows.empty() && t.rows.back().gap) gap = format_double(t.rows.back().gap);
      for (const TraceRow& r : t.rows) {
        if (r.gap && *r.gap <= cfg.bench_epsilon) {
          to_eps = std::to_string(r.iter);
          break;
        }
      }
      if (t.solver == "rgd") {
        inner = "0";
        if (!t.zeta.empty()) {
          double dmax = 0.0;
          for (const TraceRow& r : t.rows) dmax = std::max(dmax, r.dist_to_opt.value_or(0.0));
          dmax = std::max(dmax, t.dist0.value_or(0.0));
          zeta_col = format_double(zeta(*t.kappa_lb, dmax));
        }
        kappa_col = format_double(t.kappa_lb);
      } else {
        inner = std::to_string(t.total_inner_iters);
        zeta_col = not_required();
        kappa_col = not_required();
      }
    }
    if (to_eps.empty() && c.trace) to_eps = "not reached";
    table << c.label << ',' << c.solver << ',' << c.seed << ',' << gap << ',' << to_eps << ','
          << inner << ',' << zeta_col << ',' << kappa_col << '\n';
    log << std::left << std::setw(28) << c.label << std::setw(8) << c.seed << std::setw(14)
        << (gap.empty() ? "-" : gap.substr(0, 12)) << std::setw(14) << to_eps << std::setw(12)
        << inner << std::setw(14) << (zeta_col.size() > 12 ? zeta_col.substr(0, 12) : zeta_col)
        << kappa_col << '\n';
  }
  log << "wrote bench.csv and " << grid.cells.size() << " trace(s) to " << dir << '\n';
  return grid.exit_code;
}

}  // namespace hgopt
