#include "isodeform/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

namespace isodeform::report {

bool Report::all_pass() const {
  return error.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Accumulator::Accumulator(std::string name, std::string suite, double tolerance) {
  check_.name = std::move(name);
  check_.suite = std::move(suite);
  check_.tolerance = tolerance;
}

void Accumulator::add(double residual, const std::vector<double>& point) {
  // NaN counts as the worst possible residual
  const double r = std::isnan(residual) ? INFINITY : residual;
  if (check_.samples == 0 || r > check_.max_residual) {
    check_.max_residual = r;
    check_.worst_point = point;
  }
  sum_ += r;
  ++check_.samples;
}

Check Accumulator::finish(std::string note) const {
  Check c = check_;
  c.mean_residual = c.samples ? sum_ / static_cast<double>(c.samples) : 0.0;
  c.pass = c.samples > 0 && c.max_residual <= c.tolerance;
  c.note = std::move(note);
  return c;
}

std::string sci(double x) { return fmt::format("{:.6e}", x); }

namespace {

std::string point_text(const std::vector<double>& u) {
  std::string s;
  for (std::size_t i = 0; i < u.size(); ++i) s += (i ? "," : "") + sci(u[i]);
  return s;
}

}  // namespace

std::string to_text(const Report& r, bool include_time) {
  std::string out;
  out += "[report]\n";
  out += fmt::format("chart: {}\n", r.chart);
  out += fmt::format("spec: {}\n", r.spec);
  out += fmt::format("grid: {}\n", r.grid);
  out += fmt::format("order: {}\n", r.order);
  if (r.rank_min) out += fmt::format("rank_A: {}..{}\n", *r.rank_min, *r.rank_max);
  if (r.sign) out += fmt::format("sign: {:+d}\n", *r.sign);
  for (const auto& w : r.warnings) out += fmt::format("warning: {}\n", w);
  if (include_time) out += fmt::format("wall_time: {:.3f}\n", r.wall_time);
  for (const auto& c : r.checks) {
    out += "\n[check]\n";
    out += fmt::format("name: {}\n", c.name);
    out += fmt::format("suite: {}\n", c.suite);
    out += fmt::format("max: {}\n", sci(c.max_residual));
    out += fmt::format("mean: {}\n", sci(c.mean_residual));
    out += fmt::format("worst_u: {}\n", point_text(c.worst_point));
    out += fmt::format("tolerance: {}\n", sci(c.tolerance));
    out += fmt::format("samples: {}\n", c.samples);
    if (!c.note.empty()) out += fmt::format("note: {}\n", c.note);
    out += fmt::format("verdict: {}\n", c.pass ? "pass" : "fail");
  }
  out += "\n[summary]\n";
  if (!r.error.empty()) out += fmt::format("error: {}\n", r.error);
  const auto failed = std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return !c.pass; });
  out += fmt::format("checks: {}\n", r.checks.size());
  out += fmt::format("failed: {}\n", failed);
  out += fmt::format("exit_code: {}\n", r.exit_code);
  return out;
}

std::string to_json(const Report& r, bool include_time) {
  nlohmann::ordered_json j;
  j["chart"] = r.chart;
  j["spec"] = r.spec;
  j["grid"] = r.grid;
  j["order"] = r.order;
  if (r.rank_min) j["rank_A"] = {*r.rank_min, *r.rank_max};
  if (r.sign) j["sign"] = *r.sign;
  j["warnings"] = r.warnings;
  if (include_time) j["wall_time"] = r.wall_time;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["suite"] = c.suite;
    // non-finite residuals become null
    cj["max"] = std::isfinite(c.max_residual) ? nlohmann::ordered_json(c.max_residual) : nlohmann::ordered_json();
    cj["mean"] = std::isfinite(c.mean_residual) ? nlohmann::ordered_json(c.mean_residual) : nlohmann::ordered_json();
    cj["worst_u"] = c.worst_point;
    cj["tolerance"] = c.tolerance;
    cj["samples"] = c.samples;
    if (!c.note.empty()) cj["note"] = c.note;
    cj["verdict"] = c.pass ? "pass" : "fail";
    checks.push_back(std::move(cj));
  }
  if (!r.error.empty()) j["error"] = r.error;
  j["exit_code"] = r.exit_code;
  return j.dump(2) + "\n";
}

}  // namespace isodeform::report
