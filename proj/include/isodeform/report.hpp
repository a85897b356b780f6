#pragma once

// Verification reports: one entry per check plus run-level facts. The text
// form is key: value blocks and is byte-stable for identical inputs when the
// wall time is left out.

#include <optional>
#include <string>
#include <vector>

namespace isodeform::report {

struct Check {
  std::string name;
  std::string suite;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<double> worst_point;
  double tolerance = 0.0;
  std::size_t samples = 0;
  bool pass = true;
  std::string note;
};

struct Report {
  std::string chart;
  std::string spec;
  int grid = 0;
  int order = 0;
  std::optional<int> rank_min, rank_max;
  std::optional<int> sign;
  double wall_time = 0.0;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  std::string error;  // set when a module error aborted the run
  int exit_code = 0;

  bool all_pass() const;
  const Check* find(const std::string& name) const;
};

/// Accumulates residuals over sample points in order.
class Accumulator {
 public:
  Accumulator(std::string name, std::string suite, double tolerance);
  void add(double residual, const std::vector<double>& point);
  Check finish(std::string note = {}) const;

 private:
  Check check_;
  double sum_ = 0.0;
};

std::string to_text(const Report& r, bool include_time = true);
std::string to_json(const Report& r, bool include_time = true);

/// %.6e formatting used throughout the text form.
std::string sci(double x);

}  // namespace isodeform::report
