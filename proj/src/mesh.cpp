#include "isodeform/mesh.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::mesh {

namespace {

double parse_double(const std::string& s, const std::string& what) {
  double x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(fmt::format("{}: bad number '{}'", what, s), 0);
  return x;
}

}  // namespace

std::map<int, double> parse_slice(const std::string& text, int n) {
  std::map<int, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || item.size() < 2 || item[0] != 'u')
      throw ParseError(fmt::format("invalid slice '{}': expected uK=value", item), 0);
    int axis = 0;
    const std::string idx = item.substr(1, eq - 1);
    auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), axis);
    if (ec != std::errc() || ptr != idx.data() + idx.size() || axis < 1 || axis > n)
      throw ParseError(fmt::format("invalid slice '{}': axis out of range 1..{}", item, n), 0);
    if (out.count(axis - 1)) throw ParseError(fmt::format("invalid slice: u{} fixed twice", axis), 0);
    out[axis - 1] = parse_double(item.substr(eq + 1), "slice");
  }
  return out;
}

std::vector<int> parse_projection(const std::string& text, int ambient_dim) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double x = parse_double(item, "projection");
    if (x != static_cast<int>(x) || x < 1 || x > ambient_dim)
      throw ParseError(fmt::format("projection axis '{}' out of range 1..{}", item, ambient_dim), 0);
    out.push_back(static_cast<int>(x));
  }
  if (out.size() != 3) throw ParseError("projection needs exactly 3 axes", 0);
  return out;
}

std::string mesh_obj(const scene::Scene& scene, const MeshOptions& options) {
  const auto& chart = scene.chart;
  const int n = chart.n;
  for (const auto& [axis, value] : options.slice) {
    if (axis < 0 || axis >= n) throw DimensionError("slice axis out of range");
    if (value < chart.domain.lo[axis] || value > chart.domain.hi[axis])
      throw DimensionError(fmt::format("slice u{}={} lies outside the domain", axis + 1, value));
  }
  std::vector<int> free;
  for (int i = 0; i < n; ++i)
    if (!options.slice.count(i)) free.push_back(i);
  if (free.size() != 2)
    throw DimensionError(fmt::format("mesh needs exactly 2 free coordinates; fix {} of the {} with --slice", n - 2, n));
  const auto project = options.project.empty() ? scene.project : options.project;
  for (int p : project)
    if (p < 1 || p > chart.ambient_dim()) throw DimensionError("projection axis out of range");
  const int count = options.grid.value_or(scene.grid);
  if (count < 2) throw DimensionError("mesh grid needs at least 2 points per axis");

  std::vector<std::vector<double>> params;
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j) {
      std::vector<double> u(n);
      for (const auto& [axis, value] : options.slice) u[axis] = value;
      const int ij[2] = {i, j};
      for (int k = 0; k < 2; ++k) {
        const int ax = free[k];
        u[ax] = chart.domain.lo[ax] + (chart.domain.hi[ax] - chart.domain.lo[ax]) * ij[k] / (count - 1);
      }
      params.push_back(std::move(u));
    }

  std::vector<std::vector<double>> f, big_f;
  for (const auto& u : params) {
    std::vector<double> x;
    for (const auto& c : chart.components) x.push_back(expr::evaluate(c, u));
    f.push_back(std::move(x));
  }
  const bool closed = scene.pair && scene.pair->fields;
  for (const auto& u : params) {
    if (closed) {
      big_f.push_back(deformation::closed_form_F(chart, u, *scene.pair));
    } else {
      auto x = deformation::integrate_F(chart, scene.spec, params.front(), u);
      for (std::size_t a = 0; a < x.size(); ++a) x[a] += f.front()[a];
      big_f.push_back(std::move(x));
    }
  }

  std::string out = fmt::format("# {} / {}\n", chart.label, scene.variant.empty() ? "none" : scene.variant);
  auto object = [&](const char* name, const std::vector<std::vector<double>>& pts, int offset) {
    out += fmt::format("o {}\n", name);
    for (const auto& x : pts)
      out += fmt::format("v {:.9g} {:.9g} {:.9g}\n", x[project[0] - 1], x[project[1] - 1], x[project[2] - 1]);
    for (int i = 0; i + 1 < count; ++i)
      for (int j = 0; j + 1 < count; ++j) {
        const int a = offset + i * count + j + 1;
        out += fmt::format("f {} {} {} {}\n", a, a + count, a + count + 1, a + 1);
      }
  };
  object("f", f, 0);
  object("F", big_f, count * count);
  return out;
}

void export_mesh(const scene::Scene& scene, const std::string& out_path, const MeshOptions& options) {
  const std::string text = mesh_obj(scene, options);
  std::ofstream out(out_path);
  if (!out) throw Error(fmt::format("cannot write '{}'", out_path));
  out << text;
}

}  // namespace isodeform::mesh
