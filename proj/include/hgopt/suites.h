#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hgopt/geometry.h"

namespace hgopt {

struct SuiteCheck {
  std::string name;
  /// Worst observed value, in the direction described by `relation`.
  double worst = 0.0;
  double limit = 0.0;
  /// "<=" when worst must stay at or below the limit, ">=" otherwise.
  std::string relation = "<=";
  bool pass = true;
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteCheck> checks;

  bool pass() const;
};

struct SuiteOptions {
  std::uint64_t seed = 20240611;
  /// Random samples per manifold and check.
  int samples = 500;
};

/// The four reference manifolds used by the suites: R^5, H^3, SPD(3) and the
/// warped product with phi = exp(r^2). Each comes with a sampling radius.
struct SuiteManifold {
  std::shared_ptr<const Manifold> manifold;
  double radius;
};
std::vector<SuiteManifold> suite_manifolds();

const std::vector<std::string>& suite_names();

/// Runs one named suite; throws ContractViolation for unknown names.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opts);

/// Writes the per-check lines and returns whether every check passed.
bool print_report(const SuiteReport& report, std::ostream& out);

}  // namespace hgopt
