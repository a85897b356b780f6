#pragma once

// Independent reference computations for the unit tests: finite differences
// of plain functions and closed-form geometry of the catalog charts.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Fn = std::function<double(const std::vector<double>&)>;

inline std::vector<double> shifted(std::vector<double> u, int i, double h) {
  u[i] += h;
  return u;
}

// Central difference with one Richardson level.
inline double d1(const Fn& f, const std::vector<double>& u, int i, double h = 1e-3) {
  auto c = [&](double s) { return (f(shifted(u, i, s)) - f(shifted(u, i, -s))) / (2 * s); };
  return (4 * c(h / 2) - c(h)) / 3;
}

inline double d2(const Fn& f, const std::vector<double>& u, int i, int j, double h = 1e-3) {
  Fn g = [&](const std::vector<double>& v) { return d1(f, v, j, h); };
  return d1(g, u, i, h);
}

// Round 3-sphere of radius r in hyperspherical coordinates.
inline std::vector<double> sphere3(double r, const std::vector<double>& u) {
  const double s1 = std::sin(u[0]), s2 = std::sin(u[1]);
  return {r * std::cos(u[0]), r * s1 * std::cos(u[1]), r * s1 * s2 * std::cos(u[2]), r * s1 * s2 * std::sin(u[2])};
}

// Unit normal of the graph of phi with gradient p: (p, -1) / |(p, -1)|.
inline std::vector<double> graph_normal(const std::vector<double>& p) {
  double s = 1;
  for (double x : p) s += x * x;
  s = std::sqrt(s);
  std::vector<double> n;
  for (double x : p) n.push_back(x / s);
  n.push_back(-1 / s);
  return n;
}

// phi = u1^2 + 2 u2^2 + 3 u3^2
inline std::vector<double> paraboloid_gradient(const std::vector<double>& u) {
  return {2 * u[0], 4 * u[1], 6 * u[2]};
}

}  // namespace oracle
