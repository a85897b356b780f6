#pragma once

// Codazzi tensors Q on a chart, the deformed metric <Q^2 X, Y>, and the
// identities relating the deformed connection and curvature to the original
// ones:
//
//   nabla~_X Y  = Q^-1 (nabla_X (Q Y))
//   R~(X, Y) Z  = Q^-1 (R(X, Y) Q Z)

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "isodeform/geometry.hpp"

namespace isodeform::codazzi {

using geometry::Chart;
using linalg::Mat;

/// Q = Id - t A.
struct Parallel {
  double t = 0.0;
};
/// Q X = nabla_X grad g - h A X, valid when A grad g = -grad h.
struct GHPair {
  geometry::ScalarField g;
  geometry::ScalarField h;
};
/// Q = -A.
struct MinusA {};
/// Q^k_j given entry by entry, row-major (k, j).
struct Explicit {
  std::vector<expr::ExprAst> entries;
};

using CodazziSpec = std::variant<Parallel, GHPair, MinusA, Explicit>;

std::string describe(const CodazziSpec& spec);

struct EvalOptions {
  double singular_tol = 1e-9;    // sigma_min(Q) > singular_tol * sigma_max(Q)
  double constraint_tol = 1e-8;  // |A grad g + grad h|_g
  double self_adjoint_tol = 1e-10;
};

/// Jets of Q, order K - 2 for an immersion of order K. No checks.
JetMatrix codazzi_jets(const geometry::ImmersionJets& im, std::span<const double> u, const CodazziSpec& spec);

/// |A grad g + grad h|_g at the immersion's base point.
double gh_constraint_residual(const geometry::ImmersionJets& im, std::span<const double> u, const GHPair& pair);

struct CodazziFrame {
  Mat Q;
  Mat Q_inv;
  Tensor3<double> dQ;      // dQ(i, k, j) = d_i Q^k_j; empty if K < 3
  Tensor3<double> nablaQ;  // nablaQ(i, k, j) = (nabla_i Q)^k_j; empty if K < 3
  double constraint_residual = 0.0;  // GHPair only
};

/// Throws HypothesisError for a singular Q, ConstraintError when a GHPair
/// violates its gradient relation or an Explicit Q is not g-self-adjoint.
CodazziFrame eval_codazzi(const Chart& chart, std::span<const double> u, const CodazziSpec& spec, int order = 3,
                          const EvalOptions& options = {});
/// Same, reusing jets already computed at u (order >= 3 for a GHPair).
CodazziFrame eval_codazzi(const geometry::ImmersionJets& im, std::span<const double> u, const CodazziSpec& spec,
                          const EvalOptions& options = {});

/// max_{i,j} |(nabla_i Q)e_j - (nabla_j Q)e_i|_g.
double codazzi_residual_Q(const Chart& chart, std::span<const double> u, const CodazziSpec& spec,
                          const EvalOptions& options = {});

/// max |Q A - A Q|.
double commutator_residual(const geometry::PointFrame& frame, const Mat& q);

/// g~ = g Q^2 (lowered indices). Throws ConstraintError when the result is
/// not symmetric positive definite.
Mat deformed_metric(const geometry::PointFrame& frame, const Mat& q);

/// Christoffel symbols of g~ computed from the metric, against
/// Q^-1 (d_i Q e_j + Gamma Q e_j); max entry difference scaled by
/// max(1, max|Gamma~|).
double deformed_connection_residual(const Chart& chart, std::span<const double> u, const CodazziSpec& spec,
                                    const EvalOptions& options = {});

/// max_{i,j,k} |R~(e_i,e_j)e_k - Q^-1 R(e_i,e_j) Q e_k|_{g~}; evaluated with
/// fourth-order jets.
double deformed_curvature_residual(const Chart& chart, std::span<const double> u, const CodazziSpec& spec,
                                   const EvalOptions& options = {});

/// Codazzi residual of Q^-1 A with respect to the connection of g~.
double deformed_shape_codazzi_residual(const Chart& chart, std::span<const double> u, const CodazziSpec& spec,
                                       const EvalOptions& options = {});

}  // namespace isodeform::codazzi
