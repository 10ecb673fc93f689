#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hgopt/config.h"
#include "hgopt/oracles.h"

namespace hgopt {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
};

std::shared_ptr<const Manifold> build_manifold(const ManifoldSpec& spec);

/// Default curvature lower bound of a manifold, sampled over the radii in
/// `points` (plus a margin) for the warped product.
double curvature_lower_bound(const Manifold& m, const std::vector<ManifoldPoint>& points);

/// Everything a solver run needs for one seed.
struct Problem {
  std::shared_ptr<const Manifold> manifold;
  Objective objective;
  std::optional<StochasticObjective> stochastic;
  ManifoldPoint start;
  std::optional<ReferenceSolution> reference;
};

/// Builds anchors, start point and (optionally) the reference solution for
/// one seed. Deterministic in (config, seed).
Problem build_problem(const ExperimentConfig& cfg, std::shared_ptr<const Manifold> manifold,
                      std::uint64_t seed);

/// Outcome of one (seed, solver) cell.
struct CellResult {
  std::string label;
  std::string solver;
  std::uint64_t seed = 0;
  std::optional<RunTrace> trace;
  bool numerical_failure = false;
  /// Certificate checks that failed, empty when all pass.
  std::vector<std::string> violations;
  std::string message;
  std::optional<double> rate_bound;
  std::optional<double> stochastic_bound;
  std::optional<double> partial_sum_increment;
};

CellResult run_cell(const SolverSpec& spec, const Problem& problem, std::uint64_t seed,
                    bool record_wall_time);

/// "%.17g", or an empty string for a missing value.
std::string format_double(std::optional<double> v);

/// Writes the per-iteration trace with the fixed column set
/// iter,f,gap,grad_norm,dist_to_opt,inner_iters,eta,wall_ms.
void write_trace_csv(const std::string& path, const RunTrace& trace);

struct RunOptions {
  std::string output_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;
};

/// Resolves the output directory: explicit flag, then the config, then the
/// HGOPT_OUT environment variable, then ./hgopt_out.
std::string resolve_output_dir(const std::string& flag, const ExperimentConfig& cfg);

/// Executes every (seed, solver) cell, writing one CSV per run plus
/// summary.csv. Returns an ExitCode.
int cmd_run(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log);

/// Like cmd_run, and additionally writes bench.csv comparing the solvers.
/// Requires at least two solvers.
int cmd_bench(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log);

}  // namespace hgopt
