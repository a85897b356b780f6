// Command-line front end: verify, mesh, selftest.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "isodeform/acceptance.hpp"
#include "isodeform/error.hpp"
#include "isodeform/mesh.hpp"
#include "isodeform/report.hpp"
#include "isodeform/scene.hpp"
#include "isodeform/suites.hpp"

using namespace isodeform;

namespace {

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ParseError(fmt::format("bad coordinate '{}' in --point", item), 0);
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("--point needs at least one coordinate", 0);
  return out;
}

std::map<std::string, double> parse_tols(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError(fmt::format("--tol expects name=value, got '{}'", item), 0);
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw ParseError(fmt::format("bad tolerance value '{}'", value), 0);
    out[item.substr(0, eq)] = v;
  }
  return out;
}

int verify(const std::string& path, const std::string& json_out, const std::string& point, int grid,
           const std::vector<std::string>& tols) {
  const scene::Scene sc = scene::load_scene(path);
  for (const auto& w : sc.warnings) fmt::print(stderr, "warning: {}\n", w);
  suites::RunOptions opts;
  if (!point.empty()) opts.point = parse_point(point);
  if (grid > 0) opts.grid = grid;
  opts.tolerances = parse_tols(tols);
  const report::Report rep = suites::run_suites(sc, opts);
  std::fputs(report::to_text(rep).c_str(), stdout);
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    if (!out) throw Error(fmt::format("cannot write {}", json_out));
    out << report::to_json(rep);
  }
  if (!rep.error.empty()) fmt::print(stderr, "error: {}\n", rep.error);
  return rep.exit_code;
}

int mesh_cmd(const std::string& path, const std::string& out, const std::string& slice, const std::string& project,
             int grid) {
  const scene::Scene sc = scene::load_scene(path);
  mesh::MeshOptions opts;
  if (!slice.empty()) opts.slice = mesh::parse_slice(slice, sc.chart.n);
  if (!project.empty()) opts.project = mesh::parse_projection(project, sc.chart.n + 1);
  if (grid > 0) opts.grid = grid;
  mesh::export_mesh(sc, out, opts);
  fmt::print("wrote {}\n", out);
  return suites::kPass;
}

int selftest() {
  bool ok = true;
  acceptance::run_all([&](const acceptance::CriterionResult& r) {
    fmt::print("{}\n", acceptance::format_line(r));
    std::fflush(stdout);
    ok = ok && r.pass;
  });
  return ok ? suites::kPass : suites::kVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Codazzi-tensor deformations of hypersurfaces: construction and verification"};
  app.require_subcommand(1);

  std::string scene_path, json_out, point, mesh_out, slice, project;
  std::vector<std::string> tols;
  int grid = 0;

  auto* v = app.add_subcommand("verify", "run the scene's verification suites");
  v->add_option("scene", scene_path, "scene file")->required();
  v->add_option("--json", json_out, "also write the report as JSON");
  v->add_option("--point", point, "rerun at a single point u1,u2,...");
  v->add_option("--grid", grid, "points per axis (overrides the scene)");
  v->add_option("--tol", tols, "tolerance override name=value (repeatable)");

  auto* m = app.add_subcommand("mesh", "export f and F as Wavefront OBJ");
  m->add_option("scene", scene_path, "scene file")->required();
  m->add_option("--out", mesh_out, "output .obj file")->required();
  m->add_option("--slice", slice, "fixed coordinates, e.g. u3=0.7");
  m->add_option("--project", project, "three ambient axes, e.g. 1,2,3");
  m->add_option("--grid", grid, "points per free axis");

  auto* s = app.add_subcommand("selftest", "run the acceptance criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : suites::kParseError;
  }

  try {
    if (v->parsed()) return verify(scene_path, json_out, point, grid, tols);
    if (m->parsed()) return mesh_cmd(scene_path, mesh_out, slice, project, grid);
    if (s->parsed()) return selftest();
  } catch (const ParseError& e) {
    fmt::print(stderr, "parse error: {}\n", e.what());
    return suites::kParseError;
  } catch (const HypothesisError& e) {
    fmt::print(stderr, "hypothesis violated: {}\n", e.what());
    return suites::kHypothesisViolation;
  } catch (const ConstraintError& e) {
    fmt::print(stderr, "constraint violated: {}\n", e.what());
    return suites::kVerificationFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return suites::kOtherError;
  }
  return suites::kOtherError;
}
