#pragma once

// Intrinsic and extrinsic geometry of a parametrized hypersurface patch
// f: box in R^n -> R^(n+1).
//
// Conventions, used throughout the library:
//   J        (n+1) x n Jacobian, columns d_i f
//   N        generalized cross product of (d_1 f, ..., d_n f), normalized
//   g_ij     <d_i f, d_j f>,  b_ij = <d_i d_j f, N>,  A = g^-1 b
//   Gamma(k, i, j)   = Gamma^k_ij
//   R(l, k, i, j)    = R^l_kij, i.e. R(e_i, e_j) e_k = R^l_kij e_l
//   nablaA(i, k, j)  = (nabla_i A)^k_j
// With these, the Weingarten formula reads d_i N = -J A e_i.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isodeform/expr.hpp"
#include "isodeform/grid.hpp"
#include "isodeform/jet.hpp"
#include "isodeform/linalg.hpp"
#include "isodeform/tensor.hpp"

namespace isodeform::geometry {

using jet::JetScalar;
using linalg::Mat;

/// A simply connected box chart of an immersion into R^(n+1).
struct Chart {
  std::string label;
  int n = 0;
  std::vector<expr::ExprAst> components;  // n + 1 entries over u1..un
  Box domain;

  /// Parses the components and checks the box and the Jacobian rank at the
  /// box center.
  static Chart from_strings(std::string label, const std::vector<std::string>& components, Box domain);
  void validate() const;
  int ambient_dim() const { return n + 1; }
};

/// Levi-Civita data of a metric given as jets.
struct MetricJets {
  JetMatrix metric;    // order m
  JetMatrix inverse;   // order m
  JetTensor3 gamma;    // order m - 1, gamma(k, i, j)
};

MetricJets metric_geometry(const JetMatrix& metric);
/// R^l_kij from Christoffel jets (one order lower).
JetTensor4 curvature(const JetTensor3& gamma);
/// (nabla_i T)^k_j for a (1,1)-tensor given as jets (one order lower).
JetTensor3 covariant_derivative(const JetMatrix& t, const JetTensor3& gamma);

/// Jets of every first- and second-order object of an immersion, obtained by
/// differentiating the component jets of f (order K).
struct ImmersionJets {
  int n = 0;
  int order = 0;                   // K
  std::vector<JetScalar> f;        // n + 1, order K
  JetMatrix jacobian;              // (n+1) x n, order K - 1
  std::vector<JetScalar> normal;   // order K - 1
  MetricJets metric;               // g order K - 1, Gamma order K - 2
  JetMatrix second_form;           // order K - 2
  JetMatrix shape;                 // order K - 2
};

/// Requires order >= 2 for the shape operator.
ImmersionJets analyze_immersion(std::vector<JetScalar> components);
ImmersionJets chart_jets(const Chart& chart, std::span<const double> u, int order);

/// Pointwise values of the geometry at one chart point.
struct PointFrame {
  int n = 0;
  int order = 0;
  std::vector<double> u;
  std::vector<double> f;
  Mat J;                    // (n+1) x n
  Tensor3<double> d2f;      // d2f(a, i, j) = d_i d_j f_a
  std::vector<Tensor3<double>> d3f;  // d3f[a](i, j, k) = d_i d_j d_k f_a; empty if K < 3
  std::vector<double> N;
  Mat dN;                   // (n+1) x n, columns d_i N
  Mat g, g_inv;
  Tensor3<double> dg;       // dg(k, i, j) = d_k g_ij
  Mat b;
  Mat A;
  Tensor3<double> Gamma;    // Gamma(k, i, j)
  Tensor4<double> R;        // R(l, k, i, j); empty if K < 3
  Tensor3<double> nablaA;   // nablaA(i, k, j); empty if K < 3

  bool has_curvature() const { return !R.empty(); }
};

PointFrame frame_from_jets(const ImmersionJets& jets, std::span<const double> u);
/// Throws DimensionError outside the domain, HypothesisError for a
/// degenerate Jacobian or a metric that is not positive definite.
PointFrame frame_at(const Chart& chart, std::span<const double> u, int order = 3);

/// |v|_g = sqrt(v^T g v).
double g_norm(const Mat& g, std::span<const double> v);
/// max |g T - T^T g|.
double self_adjoint_residual(const Mat& g, const Mat& t);

/// max_i |d_i N + J A e_i| with the frame's own A or a substitute.
double weingarten_residual(const PointFrame& frame);
double weingarten_residual(const PointFrame& frame, const Mat& shape);
double weingarten_residual(const Chart& chart, std::span<const double> u);

/// max_{i,j,k} |R(e_i,e_j)e_k - (<Ae_j,e_k> Ae_i - <Ae_i,e_k> Ae_j)|_g.
double gauss_residual(const PointFrame& frame);
/// max_{i,j} |(nabla_i A)e_j - (nabla_j A)e_i|_g.
double codazzi_residual_A(const PointFrame& frame);
/// max |d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il|.
double metric_compatibility_residual(const PointFrame& frame);
/// max |R^l_kij + R^l_ijk + R^l_jki|.
double bianchi_residual(const PointFrame& frame);

struct AmbientSplit {
  std::vector<double> tangent;  // Z_top, coordinate components
  double normal = 0.0;          // h
};
/// Z = df(Z_top) + h N.
AmbientSplit decompose_ambient(const PointFrame& frame, std::span<const double> z);

struct GradHessJets {
  std::vector<JetScalar> grad;  // contravariant, order K - 1
  JetMatrix hess;               // (hess)^k_i, order K - 2
};
GradHessJets grad_hess(const ImmersionJets& im, const JetScalar& s);

struct GradHess {
  std::vector<double> grad;
  Mat hess;
};
GradHess scalar_grad_hess(const Chart& chart, std::span<const double> u, const expr::ExprAst& s, int order = 3);

int rank_A(const PointFrame& frame, double tol = 1e-9);

/// Central differences with one Richardson level, evaluated through the plain
/// double evaluator.
struct FiniteDifferenceFrame {
  std::vector<double> f;
  Mat J;
  Tensor3<double> d2f;
};
FiniteDifferenceFrame fd_oracle(const Chart& chart, std::span<const double> u);
inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdSecondStep = 1e-3;

/// A scalar function on the chart, either an expression in u or a quantity
/// derived from the immersion jets (support function, <N, a>, ...). Derived
/// fields return jets of order at least K - 1.
class ScalarField {
 public:
  using JetFn = std::function<JetScalar(const ImmersionJets&, std::span<const double>)>;

  static ScalarField expression(expr::ExprAst ast);
  static ScalarField derived(std::string label, JetFn fn);

  JetScalar jet(const ImmersionJets& im, std::span<const double> u) const;
  double value(const ImmersionJets& im, std::span<const double> u) const { return jet(im, u).value(); }
  const std::string& label() const { return label_; }
  const expr::ExprAst* ast() const { return ast_ ? &*ast_ : nullptr; }

 private:
  std::string label_;
  std::optional<expr::ExprAst> ast_;
  JetFn fn_;
};

}  // namespace isodeform::geometry
