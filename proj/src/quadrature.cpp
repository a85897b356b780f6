#include "isodeform/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::quadrature {

namespace {

Rule build_rule(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    double p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    r.nodes[i] = x;
    r.weights[i] = 2 / ((1 - x * x) * dp * dp);
  }
  return r;
}

double lagrange(int count, int j, double x) {
  double v = 1;
  for (int k = 0; k < count; ++k)
    if (k != j) v *= (x - k) / (j - k);
  return v;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1 || n > 64) throw DimensionError(fmt::format("Gauss-Legendre order {} out of range", n));
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

std::vector<double> integrate(const VectorIntegrand& f, double a, double b, int dim,
                              const AdaptiveOptions& options) {
  const Rule& rule = gauss_legendre(options.nodes);
  auto composite = [&](int panels) {
    std::vector<double> sum(dim, 0.0);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const auto v = f(mid + 0.5 * h * rule.nodes[q]);
        for (int d = 0; d < dim; ++d) sum[d] += 0.5 * h * rule.weights[q] * v[d];
      }
    }
    return sum;
  };
  if (a == b) return std::vector<double>(dim, 0.0);
  auto prev = composite(1);
  double change = 0;
  for (int level = 1; level <= options.max_levels; ++level) {
    auto next = composite(1 << level);
    change = 0;
    for (int d = 0; d < dim; ++d) change = std::max(change, std::abs(next[d] - prev[d]));
    if (change < options.tol) return next;
    prev = std::move(next);
  }
  throw NumericalError(fmt::format("quadrature on [{}, {}] did not converge after {} levels (last change {:.3e})", a,
                                   b, options.max_levels, change));
}

std::vector<std::vector<double>> cumulative_weights(int count) {
  // each basis polynomial has degree count - 1, so a rule with count nodes
  // per unit interval is exact
  const Rule& rule = gauss_legendre(count);
  std::vector<std::vector<double>> w(count, std::vector<double>(count, 0.0));
  for (int j = 0; j < count; ++j)
    for (int m = 1; m < count; ++m) {
      double piece = 0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        piece += 0.5 * rule.weights[q] * lagrange(count, j, m - 0.5 + 0.5 * rule.nodes[q]);
      w[m][j] = w[m - 1][j] + piece;
    }
  return w;
}

std::vector<std::vector<double>> differentiation_matrix(int count) {
  // barycentric weights of the nodes 0..count-1
  std::vector<double> bw(count, 1.0);
  for (int j = 0; j < count; ++j)
    for (int k = 0; k < count; ++k)
      if (k != j) bw[j] /= (j - k);
  std::vector<std::vector<double>> dm(count, std::vector<double>(count, 0.0));
  for (int m = 0; m < count; ++m) {
    double diag = 0;
    for (int j = 0; j < count; ++j) {
      if (j == m) continue;
      dm[m][j] = bw[j] / bw[m] / (m - j);
      diag -= dm[m][j];
    }
    dm[m][m] = diag;
  }
  return dm;
}

}  // namespace isodeform::quadrature
