#include "isodeform/catalog.hpp"

#include <numbers>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::catalog {

using geometry::Chart;

namespace {

Box cube(int n, double lo, double hi) { return Box{std::vector<double>(n, lo), std::vector<double>(n, hi)}; }

std::vector<std::string> hyperspherical(double r) {
  const std::string s = fmt::format("{}", r);
  return {s + "*cos(u1)", s + "*sin(u1)*cos(u2)", s + "*sin(u1)*sin(u2)*cos(u3)", s + "*sin(u1)*sin(u2)*sin(u3)"};
}

void require_positive(double x, const char* what) {
  if (!(x > 0)) throw DimensionError(fmt::format("catalog: {} must be positive, got {}", what, x));
}

}  // namespace

Chart flat(int n) {
  std::vector<std::string> comps;
  for (int i = 1; i <= n; ++i) comps.push_back(fmt::format("u{}", i));
  comps.push_back("0");
  return Chart::from_strings(fmt::format("plane{}", n), comps, cube(n, -1.0, 1.0));
}

Chart plane2() { return flat(2); }

Chart torus2(double major, double minor) {
  require_positive(minor, "torus minor radius");
  if (!(major > minor)) throw DimensionError("catalog: torus needs R > r");
  const std::string ring = fmt::format("({} + {}*cos(u2))", major, minor);
  return Chart::from_strings(fmt::format("torus2(R={}, r={})", major, minor),
                             {ring + "*cos(u1)", ring + "*sin(u1)", fmt::format("{}*sin(u2)", minor)},
                             cube(2, 0.0, 2 * std::numbers::pi));
}

Chart sphere3(double r) {
  require_positive(r, "sphere radius");
  return Chart::from_strings(fmt::format("sphere3(r={})", r), hyperspherical(r), cube(3, 0.4, 1.1));
}

Chart ellipsoid3(double a, double b, double c, double d) {
  for (double x : {a, b, c, d}) require_positive(x, "ellipsoid semi-axis");
  const std::vector<std::string> comps{fmt::format("{}*cos(u1)", a), fmt::format("{}*sin(u1)*cos(u2)", b),
                                       fmt::format("{}*sin(u1)*sin(u2)*cos(u3)", c),
                                       fmt::format("{}*sin(u1)*sin(u2)*sin(u3)", d)};
  return Chart::from_strings(fmt::format("ellipsoid3(a={}, b={}, c={}, d={})", a, b, c, d), comps,
                             cube(3, 0.4, 1.1));
}

Chart graph3(const std::string& phi) {
  return Chart::from_strings(fmt::format("graph3({})", phi), {"u1", "u2", "u3", phi}, cube(3, -0.5, 0.5));
}

Chart sphcyl4(double r) {
  require_positive(r, "sphere radius");
  auto comps = hyperspherical(r);
  comps.push_back("u4");
  // components over u1..u4; the sphere part ignores u4
  return Chart::from_strings(fmt::format("sphcyl4(r={})", r), comps,
                             Box{{0.4, 0.4, 0.4, -0.5}, {1.1, 1.1, 1.1, 0.5}});
}

}  // namespace isodeform::catalog
