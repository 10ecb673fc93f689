// hgopt: run, verify and benchmark proximal methods on Hadamard manifolds.

#include <CLI11.hpp>

#include <iostream>

#include "hgopt/experiment.h"
#include "hgopt/suites.h"

namespace {

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const hgopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return hgopt::kExitConfig;
  } catch (const hgopt::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return hgopt::kExitNumerical;
  } catch (const hgopt::DomainExitError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return hgopt::kExitNumerical;
  } catch (const hgopt::ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return hgopt::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hgopt::kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal methods on Hadamard manifolds"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment configuration (YAML)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "Output directory (default: config, then $HGOPT_OUT)");
    cmd->add_option("--seed", seed, "Override the config seeds with a single seed");
    cmd->add_option("--jobs", jobs, "Parallel grid cells")->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "Run every (seed, solver) cell of a config");
  add_run_flags(run);
  CLI::App* bench = app.add_subcommand("bench", "Compare two or more solvers of a config");
  add_run_flags(bench);

  CLI::App* verify = app.add_subcommand("verify", "Run randomized property suites");
  std::vector<std::string> suites;
  int samples = hgopt::SuiteOptions{}.samples;
  verify->add_option("suites", suites, "Subset of quasilinear, geometry, convexity, rates, appendix")
      ->check(CLI::IsMember(hgopt::suite_names()));
  verify->add_option("--seed", seed, "Seed for the randomized sweeps");
  verify->add_option("--samples", samples, "Samples per manifold and check")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hgopt::kExitConfig;
  }

  auto run_options = [&] {
    hgopt::RunOptions opts;
    opts.output_dir = out_dir;
    opts.jobs = jobs;
    if (run->count("--seed") + bench->count("--seed") > 0) opts.seed_override = seed;
    return opts;
  };

  if (*run) {
    return guarded([&] {
      return hgopt::cmd_run(hgopt::parse_config_file(config_path), run_options(), std::cout);
    });
  }
  if (*bench) {
    return guarded([&] {
      return hgopt::cmd_bench(hgopt::parse_config_file(config_path), run_options(), std::cout);
    });
  }
  return guarded([&] {
    hgopt::SuiteOptions opts;
    if (verify->count("--seed") > 0) opts.seed = seed;
    opts.samples = samples;
    if (suites.empty()) suites = hgopt::suite_names();
    bool ok = true;
    for (const auto& s : suites) ok = hgopt::print_report(hgopt::run_suite(s, opts), std::cout) && ok;
    return ok ? hgopt::kExitOk : hgopt::kExitViolation;
  });
}
