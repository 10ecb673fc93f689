#include "hgopt/config.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace hgopt {

namespace {

int line_of(const YAML::Node& n) {
  const YAML::Mark mark = n.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

void require_map(const YAML::Node& n, const std::string& what) {
  if (!n.IsMap()) throw ConfigError(what + " must be a mapping", line_of(n));
}

void reject_unknown(const YAML::Node& n, const std::string& section,
                    const std::set<std::string>& allowed) {
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown key '" + key + "' in " + section, line_of(kv.first));
    }
  }
}

double as_double(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(field + " must be a number", line_of(n));
  const std::string s = n.Scalar();
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field + " must be a number, got '" + s + "'", line_of(n));
  }
}

double as_finite(const YAML::Node& n, const std::string& field) {
  const double v = as_double(n, field);
  if (!std::isfinite(v)) throw ConfigError(field + " must be finite", line_of(n));
  return v;
}

double as_positive(const YAML::Node& n, const std::string& field) {
  const double v = as_finite(n, field);
  if (!(v > 0.0)) throw ConfigError(field + " must be > 0", line_of(n));
  return v;
}

long long as_int(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(field + " must be an integer", line_of(n));
  try {
    return n.as<long long>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field + " must be an integer, got '" + n.Scalar() + "'", line_of(n));
  }
}

bool as_bool(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field + " must be true or false", line_of(n));
  }
}

std::string as_string(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(field + " must be a string", line_of(n));
  return n.Scalar();
}

std::vector<double> as_vector(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) throw ConfigError(field + " must be a list of numbers", line_of(n));
  std::vector<double> out;
  for (const auto& e : n) out.push_back(as_finite(e, field));
  return out;
}

void parse_manifold(const YAML::Node& n, ManifoldSpec& m) {
  require_map(n, "manifold");
  reject_unknown(n, "manifold", {"type", "dim", "curvature", "n", "phi", "interval"});
  if (!n["type"]) throw ConfigError("manifold.type is required", line_of(n));
  m.type = as_string(n["type"], "manifold.type");
  if (m.type != "euclidean" && m.type != "hyperbolic" && m.type != "spd" && m.type != "warped") {
    throw ConfigError("manifold.type must be euclidean, hyperbolic, spd or warped",
                      line_of(n["type"]));
  }
  if (n["dim"]) {
    const long long d = as_int(n["dim"], "manifold.dim");
    if (d < 1) throw ConfigError("manifold.dim must be >= 1", line_of(n["dim"]));
    m.dim = static_cast<int>(d);
  }
  if (n["curvature"]) {
    m.curvature = as_finite(n["curvature"], "manifold.curvature");
    if (!(m.curvature < 0.0)) {
      throw ConfigError("manifold.curvature must be < 0", line_of(n["curvature"]));
    }
  }
  if (n["n"]) {
    const long long k = as_int(n["n"], "manifold.n");
    if (k < 1) throw ConfigError("manifold.n must be >= 1", line_of(n["n"]));
    m.n = static_cast<int>(k);
  }
  if (n["phi"]) {
    m.phi = as_string(n["phi"], "manifold.phi");
    if (m.phi != "cosh" && m.phi != "exp_r2" && m.phi != "t2" && m.phi != "flat") {
      throw ConfigError("manifold.phi must be cosh, exp_r2, t2 or flat", line_of(n["phi"]));
    }
  }
  if (n["interval"]) {
    const YAML::Node& iv = n["interval"];
    if (!iv.IsSequence() || iv.size() != 2) {
      throw ConfigError("manifold.interval must be [lo, hi]", line_of(iv));
    }
    m.lo = as_double(iv[0], "manifold.interval");
    m.hi = as_double(iv[1], "manifold.interval");
    if (!(*m.lo < *m.hi)) throw ConfigError("manifold.interval needs lo < hi", line_of(iv));
  }
  if (m.type != "warped" && (n["phi"] || n["interval"])) {
    throw ConfigError("phi and interval apply to warped manifolds only", line_of(n));
  }
}

void parse_objective(const YAML::Node& n, ObjectiveSpec& o) {
  require_map(n, "objective");
  reject_unknown(n, "objective", {"type", "anchors", "num_anchors", "anchor_radius", "weights"});
  if (!n["type"]) throw ConfigError("objective.type is required", line_of(n));
  o.type = as_string(n["type"], "objective.type");
  if (o.type != "sqdist" && o.type != "frechet" && o.type != "stochastic_frechet") {
    throw ConfigError("objective.type must be sqdist, frechet or stochastic_frechet",
                      line_of(n["type"]));
  }
  if (n["anchors"]) {
    const YAML::Node& a = n["anchors"];
    if (!a.IsSequence()) throw ConfigError("objective.anchors must be a list", line_of(a));
    for (const auto& e : a) o.anchors.push_back(as_vector(e, "objective.anchors entry"));
    if (o.anchors.empty()) throw ConfigError("objective.anchors is empty", line_of(a));
  }
  if (n["num_anchors"]) {
    const long long k = as_int(n["num_anchors"], "objective.num_anchors");
    if (k < 1) throw ConfigError("objective.num_anchors must be >= 1", line_of(n["num_anchors"]));
    o.num_anchors = static_cast<int>(k);
  }
  if (n["anchor_radius"]) {
    o.anchor_radius = as_finite(n["anchor_radius"], "objective.anchor_radius");
    if (o.anchor_radius < 0.0) {
      throw ConfigError("objective.anchor_radius must be >= 0", line_of(n["anchor_radius"]));
    }
  }
  if (n["weights"]) o.weights = as_vector(n["weights"], "objective.weights");

  const std::size_t count =
      o.anchors.empty() ? static_cast<std::size_t>(o.num_anchors) : o.anchors.size();
  if (o.type == "sqdist" && count != 1) {
    throw ConfigError("sqdist takes exactly one anchor", line_of(n));
  }
  if (o.type == "stochastic_frechet" && count < 2) {
    throw ConfigError("stochastic_frechet needs at least two anchors", line_of(n));
  }
  if (!o.weights.empty()) {
    if (o.weights.size() != count) {
      throw ConfigError("objective.weights length differs from the anchor count",
                        line_of(n["weights"]));
    }
    if (o.type == "stochastic_frechet") {
      throw ConfigError("stochastic_frechet samples anchors uniformly; weights are not allowed",
                        line_of(n["weights"]));
    }
    for (double w : o.weights) {
      if (w < 0.0) throw ConfigError("objective.weights must be >= 0", line_of(n["weights"]));
    }
  }
}

std::size_t ambient_size(const ManifoldSpec& m) {
  if (m.type == "hyperbolic") return static_cast<std::size_t>(m.dim) + 1;
  if (m.type == "spd") return static_cast<std::size_t>(m.n) * static_cast<std::size_t>(m.n);
  if (m.type == "warped") return 2;
  return static_cast<std::size_t>(m.dim);
}

void parse_start(const YAML::Node& n, StartSpec& s) {
  require_map(n, "start");
  reject_unknown(n, "start", {"coords", "radius"});
  if (n["coords"]) s.coords = as_vector(n["coords"], "start.coords");
  if (n["radius"]) {
    s.radius = as_finite(n["radius"], "start.radius");
    if (s.radius < 0.0) throw ConfigError("start.radius must be >= 0", line_of(n["radius"]));
  }
}

void parse_inner(const YAML::Node& n, InnerConfig& in) {
  require_map(n, "inner");
  reject_unknown(n, "inner", {"grad_tol", "tol_schedule_c", "max_iters", "step_rule", "L0"});
  if (n["grad_tol"]) in.grad_tol = as_positive(n["grad_tol"], "inner.grad_tol");
  if (n["tol_schedule_c"]) {
    in.tol_schedule_c = as_positive(n["tol_schedule_c"], "inner.tol_schedule_c");
  }
  if (n["max_iters"]) {
    const long long k = as_int(n["max_iters"], "inner.max_iters");
    if (k < 1) throw ConfigError("inner.max_iters must be >= 1", line_of(n["max_iters"]));
    in.max_iters = static_cast<int>(k);
  }
  if (n["step_rule"]) {
    const std::string r = as_string(n["step_rule"], "inner.step_rule");
    if (r == "backtracking") {
      in.step_rule = StepRule::backtracking;
    } else if (r == "fixed") {
      in.step_rule = StepRule::fixed;
    } else {
      throw ConfigError("inner.step_rule must be backtracking or fixed", line_of(n["step_rule"]));
    }
  }
  if (n["L0"]) in.fixed_L0 = as_positive(n["L0"], "inner.L0");
}

SolverSpec parse_solver(const YAML::Node& n) {
  require_map(n, "solver entry");
  reject_unknown(n, "solver", {"name", "label", "schedule", "eta", "c", "L", "T", "inner",
                               "early_stop", "kappa_lb"});
  SolverSpec s;
  if (!n["name"]) throw ConfigError("solver.name is required", line_of(n));
  s.name = as_string(n["name"], "solver.name");
  if (s.name != "proximal_gradient" && s.name != "stochastic_proximal_gradient" &&
      s.name != "rgd") {
    throw ConfigError("solver.name must be proximal_gradient, stochastic_proximal_gradient or rgd",
                      line_of(n["name"]));
  }
  s.label = n["label"] ? as_string(n["label"], "solver.label") : s.name;
  for (char ch : s.label) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) {
      throw ConfigError("solver.label may only contain letters, digits, '_', '-' and '.'",
                        line_of(n["label"]));
    }
  }

  const bool stochastic = s.name == "stochastic_proximal_gradient";
  std::string schedule = stochastic ? "inv_sqrt" : "constant";
  if (n["schedule"]) schedule = as_string(n["schedule"], "solver.schedule");
  if (schedule == "constant") {
    s.schedule.kind = ScheduleKind::constant;
  } else if (schedule == "inv_sqrt") {
    s.schedule.kind = ScheduleKind::inv_sqrt;
  } else if (schedule == "inv_sqrt_log") {
    s.schedule.kind = ScheduleKind::inv_sqrt_log;
  } else {
    throw ConfigError("solver.schedule must be constant, inv_sqrt or inv_sqrt_log",
                      line_of(n["schedule"]));
  }
  if (stochastic && s.schedule.kind == ScheduleKind::constant) {
    throw ConfigError("stochastic_proximal_gradient needs schedule inv_sqrt or inv_sqrt_log",
                      line_of(n["schedule"] ? n["schedule"] : n));
  }
  if (s.name == "rgd" && s.schedule.kind != ScheduleKind::constant) {
    throw ConfigError("rgd supports the constant schedule only", line_of(n["schedule"]));
  }
  if (n["eta"]) {
    if (s.schedule.kind != ScheduleKind::constant) {
      throw ConfigError("solver.eta applies to the constant schedule only", line_of(n["eta"]));
    }
    s.schedule.eta = as_positive(n["eta"], "solver.eta");
  }
  if (n["c"]) s.schedule.c = as_positive(n["c"], "solver.c");
  if (n["L"]) {
    if (n["L"].IsScalar() && n["L"].Scalar() == "estimate") {
      s.estimate_L = true;
    } else {
      s.schedule.L = as_positive(n["L"], "solver.L");
    }
  } else {
    s.estimate_L = s.schedule.kind != ScheduleKind::constant || stochastic;
  }
  if (n["T"]) {
    const long long t = as_int(n["T"], "solver.T");
    if (t < 1) throw ConfigError("solver.T must be >= 1", line_of(n["T"]));
    s.T = static_cast<int>(t);
  }
  if (n["inner"]) parse_inner(n["inner"], s.inner);
  if (n["early_stop"]) {
    s.early_stop = as_bool(n["early_stop"], "solver.early_stop");
    if (s.early_stop && s.name != "proximal_gradient") {
      throw ConfigError("early_stop applies to proximal_gradient only", line_of(n["early_stop"]));
    }
  }
  if (n["kappa_lb"]) {
    if (s.name != "rgd") throw ConfigError("kappa_lb applies to rgd only", line_of(n["kappa_lb"]));
    if (!(n["kappa_lb"].IsScalar() && n["kappa_lb"].Scalar() == "auto")) {
      s.kappa_lb = as_finite(n["kappa_lb"], "solver.kappa_lb");
      if (*s.kappa_lb > 0.0) throw ConfigError("kappa_lb must be <= 0", line_of(n["kappa_lb"]));
    }
  }
  return s;
}

ExperimentConfig parse_root(const YAML::Node& root) {
  if (!root || root.IsNull()) throw ConfigError("configuration is empty", 0);
  require_map(root, "configuration");
  reject_unknown(root, "configuration",
                 {"manifold", "objective", "start", "solvers", "seeds", "output", "reference",
                  "record_wall_time", "bench"});
  ExperimentConfig cfg;
  if (!root["manifold"]) throw ConfigError("missing section 'manifold'", line_of(root));
  parse_manifold(root["manifold"], cfg.manifold);
  if (!root["objective"]) throw ConfigError("missing section 'objective'", line_of(root));
  parse_objective(root["objective"], cfg.objective);
  if (root["start"]) parse_start(root["start"], cfg.start);

  if (!root["solvers"]) throw ConfigError("missing section 'solvers'", line_of(root));
  const YAML::Node& solvers = root["solvers"];
  if (!solvers.IsSequence() || solvers.size() == 0) {
    throw ConfigError("solvers must be a non-empty list", line_of(solvers));
  }
  std::set<std::string> labels;
  for (const auto& s : solvers) {
    cfg.solvers.push_back(parse_solver(s));
    if (!labels.insert(cfg.solvers.back().label).second) {
      throw ConfigError("duplicate solver label '" + cfg.solvers.back().label + "'", line_of(s));
    }
  }

  if (root["seeds"]) {
    const YAML::Node& s = root["seeds"];
    cfg.seeds.clear();
    auto push = [&](const YAML::Node& e) {
      const long long v = as_int(e, "seeds");
      if (v < 0) throw ConfigError("seeds must be >= 0", line_of(e));
      cfg.seeds.push_back(static_cast<std::uint64_t>(v));
    };
    if (s.IsSequence()) {
      for (const auto& e : s) push(e);
    } else {
      push(s);
    }
    if (cfg.seeds.empty()) throw ConfigError("seeds must not be empty", line_of(s));
  }
  if (root["output"]) {
    const YAML::Node& o = root["output"];
    require_map(o, "output");
    reject_unknown(o, "output", {"dir"});
    if (o["dir"]) cfg.output_dir = as_string(o["dir"], "output.dir");
  }
  if (root["reference"]) cfg.reference = as_bool(root["reference"], "reference");
  if (root["record_wall_time"]) {
    cfg.record_wall_time = as_bool(root["record_wall_time"], "record_wall_time");
  }
  if (root["bench"]) {
    const YAML::Node& b = root["bench"];
    require_map(b, "bench");
    reject_unknown(b, "bench", {"epsilon"});
    if (b["epsilon"]) cfg.bench_epsilon = as_positive(b["epsilon"], "bench.epsilon");
  }

  const std::size_t ambient = ambient_size(cfg.manifold);
  if (!cfg.start.coords.empty() && cfg.start.coords.size() != ambient) {
    throw ConfigError("start.coords has " + std::to_string(cfg.start.coords.size()) +
                          " entries, the manifold needs " + std::to_string(ambient),
                      line_of(root["start"]["coords"]));
  }
  for (std::size_t i = 0; i < cfg.objective.anchors.size(); ++i) {
    if (cfg.objective.anchors[i].size() != ambient) {
      throw ConfigError("objective.anchors[" + std::to_string(i) + "] has " +
                            std::to_string(cfg.objective.anchors[i].size()) +
                            " entries, the manifold needs " + std::to_string(ambient),
                        line_of(root["objective"]["anchors"][i]));
    }
  }

  const bool wants_stochastic =
      std::any_of(cfg.solvers.begin(), cfg.solvers.end(),
                  [](const SolverSpec& s) { return s.name == "stochastic_proximal_gradient"; });
  if (wants_stochastic && cfg.objective.type == "sqdist") {
    throw ConfigError("stochastic_proximal_gradient needs a frechet or stochastic_frechet objective",
                      line_of(root["objective"]));
  }
  if (wants_stochastic && !cfg.objective.weights.empty()) {
    throw ConfigError("stochastic_proximal_gradient samples anchors uniformly; drop weights",
                      line_of(root["objective"]));
  }
  return cfg;
}

ExperimentConfig parse_yaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("YAML syntax error: " + e.msg, e.mark.line + 1);
  }
  try {
    return parse_root(root);
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_yaml(buf.str());
}

ExperimentConfig parse_config_string(const std::string& text) { return parse_yaml(text); }

}  // namespace hgopt
