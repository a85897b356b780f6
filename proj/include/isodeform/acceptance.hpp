#pragma once

// The acceptance suite: eleven criteria, each reduced to pass/fail with a
// one-line detail. Shared by the acceptance test binary and `selftest`.

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace isodeform::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs every criterion in order; `on_result` (optional) sees each result as
/// soon as it is available.
std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  title: detail (1.23 s)".
std::string format_line(const CriterionResult& r);

/// Random DSL text over u1..u{n_vars}, with random spacing and redundant
/// parentheses; always parses.
std::string random_expression(std::mt19937_64& rng, int depth, int n_vars);

}  // namespace isodeform::acceptance
