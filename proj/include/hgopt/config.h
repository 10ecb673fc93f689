#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgopt/errors.h"
#include "hgopt/solvers.h"

namespace hgopt {

/// Malformed or invalid configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

struct ManifoldSpec {
  std::string type;  // euclidean | hyperbolic | spd | warped
  int dim = 2;
  double curvature = -1.0;
  int n = 3;
  std::string phi = "cosh";
  /// Warped interval; defaults to the natural domain of phi.
  std::optional<double> lo;
  std::optional<double> hi;
};

struct ObjectiveSpec {
  std::string type;  // sqdist | frechet | stochastic_frechet
  /// Explicit anchor coordinates; empty means `num_anchors` random anchors.
  std::vector<std::vector<double>> anchors;
  int num_anchors = 4;
  double anchor_radius = 1.0;
  std::vector<double> weights;
};

struct StartSpec {
  std::vector<double> coords;  // empty means random
  double radius = 1.0;
};

struct SolverSpec {
  std::string name;  // proximal_gradient | stochastic_proximal_gradient | rgd
  std::string label;
  StepSchedule schedule;
  /// Schedule L is estimated from the objective when not given.
  bool estimate_L = false;
  int T = 100;
  InnerConfig inner;
  bool early_stop = false;
  /// RGD curvature lower bound; unset means derived from the manifold.
  std::optional<double> kappa_lb;
};

struct ExperimentConfig {
  ManifoldSpec manifold;
  ObjectiveSpec objective;
  StartSpec start;
  std::vector<SolverSpec> solvers;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir;
  bool reference = true;
  bool record_wall_time = false;
  /// Threshold for the "iterations to gap <= epsilon" bench column.
  double bench_epsilon = 1e-6;
};

/// Parses a YAML experiment file. Unknown keys, wrong types and invalid
/// values raise ConfigError with the offending line.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_string(const std::string& text);

}  // namespace hgopt
