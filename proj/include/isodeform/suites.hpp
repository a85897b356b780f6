#pragma once

// Runs the verification suites of a scene over its sample grid.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isodeform/report.hpp"
#include "isodeform/scene.hpp"

namespace isodeform::suites {

struct RunOptions {
  std::optional<std::vector<double>> point;  // single-point rerun
  std::optional<int> grid;
  std::map<std::string, double> tolerances;  // overrides on top of the scene's
};

enum ExitCode : int {
  kPass = 0,
  kOtherError = 1,
  kVerificationFailure = 2,
  kHypothesisViolation = 3,
  kParseError = 4,
};

/// Never throws for module errors: they end the run with `error` and a
/// nonzero exit code (3 for hypothesis violations, 2 for constraint
/// violations, 1 otherwise).
report::Report run_suites(const scene::Scene& scene, const RunOptions& options = {});

/// Axis count used for path-integrated samples: the run grid for n <= 3,
/// at most 5 per axis above that.
int path_grid_count(int n, int grid);

}  // namespace isodeform::suites
