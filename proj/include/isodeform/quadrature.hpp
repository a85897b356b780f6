#pragma once

// Gauss-Legendre quadrature, fixed and adaptive composite, plus exact
// polynomial-interpolation weights for equispaced samples.

#include <functional>
#include <span>
#include <vector>

namespace isodeform::quadrature {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule; nodes by Newton iteration on P_n.
const Rule& gauss_legendre(int n);

using VectorIntegrand = std::function<std::vector<double>(double)>;

struct AdaptiveOptions {
  int nodes = 16;
  double tol = 1e-10;  // on the max-norm change between successive levels
  int max_levels = 12;
};

/// Composite rule over [a, b] with 1, 2, 4, ... panels until two successive
/// estimates agree. Throws NumericalError if max_levels is reached first.
std::vector<double> integrate(const VectorIntegrand& f, double a, double b, int dim,
                              const AdaptiveOptions& options = {});

/// W(m, j): integral from node 0 to node m of the j-th Lagrange basis
/// polynomial on the nodes 0, 1, ..., count - 1. Multiply by the spacing.
std::vector<std::vector<double>> cumulative_weights(int count);

/// D(m, j) = L_j'(x_m) for unit spacing; divide by h.
std::vector<std::vector<double>> differentiation_matrix(int count);

}  // namespace isodeform::quadrature
