#pragma once

// Isometric realization of deformed metrics <Q^2 X, Y>: the closed form
// F = df(grad g) + h N, path integration of dF = df o Q, the deformed shape
// operator, and recovery of (g, h) from a sampled F.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isodeform/codazzi.hpp"
#include "isodeform/grid.hpp"
#include "isodeform/quadrature.hpp"

namespace isodeform::deformation {

using geometry::Chart;
using linalg::Mat;

enum class Provenance { Example5, Example6, UserSupplied, Extracted };

/// (g, h) on a grid, for pairs recovered from samples.
struct SampledPair {
  SampleGrid grid;
  std::vector<double> g;
  std::vector<double> h;
};

struct GHPairData {
  Provenance provenance = Provenance::UserSupplied;
  double t = 0.0;               // Example5
  std::vector<double> a;        // Example6
  std::optional<codazzi::GHPair> fields;
  std::optional<SampledPair> samples;

  codazzi::CodazziSpec spec() const;
};

/// g = |f|^2 / 2, h = <f, N> + t; Q = Id - t A.
GHPairData gh_from_example5(const Chart& chart, double t);
/// g = <f, a>, h = <N, a> + 1; Q = -A and F = a + N.
GHPairData gh_from_example6(const Chart& chart, std::span<const double> a);
GHPairData gh_user(codazzi::GHPair pair);

/// Jets of F = J grad g + h N; order K - 1 for an immersion of order K.
std::vector<jet::JetScalar> closed_form_F_jets(const geometry::ImmersionJets& im, std::span<const double> u,
                                               const codazzi::GHPair& pair);
/// Checks the gradient constraint at u first (ConstraintError).
std::vector<double> closed_form_F(const Chart& chart, std::span<const double> u, const GHPairData& gh,
                                  const codazzi::EvalOptions& options = {});

/// f, F and the frame of F at one point, with F re-analyzed as an immersion.
struct DeformedFrame {
  geometry::PointFrame base;  // frame of f
  codazzi::CodazziFrame codazzi;
  std::vector<double> F;
  Mat dF;                     // (n+1) x n, columns d_i F
  std::vector<double> normal;  // N_F
  Mat metric;                 // <d_i F, d_j F>
  Mat shape;                  // A~
  Tensor3<double> nabla_shape;  // (nabla~_i A~)^k_j from the jets of F
};

/// Needs f to order 4 (F to order 3); `order` below 4 is raised to 4.
DeformedFrame deformed_frame(const Chart& chart, std::span<const double> u, const GHPairData& gh, int order = 4,
                             const codazzi::EvalOptions& options = {});

/// max |<d_i F, d_j F> - (g Q^2)_ij|.
double metric_realization_residual(const DeformedFrame& df);
/// max |d_i F - J Q e_i|.
double differential_residual(const DeformedFrame& df);
/// Codazzi residual of A~ under the Levi-Civita connection of F's metric,
/// max_{i,j} |(nabla~_i A~)e_j - (nabla~_j A~)e_i|_{g~}.
double shape_codazzi_residual(const DeformedFrame& df);

struct ShapeComparison {
  Mat A_tilde;
  int sign = 1;            // argmin over s of |A~ - s Q^-1 A|
  double residual = 0.0;   // at the argmin
  double metric_residual = 0.0;  // |g~_F - g Q^2|
  double self_adjoint_residual = 0.0;  // |g~ A~ - A~^T g~|
};
ShapeComparison deformed_shape_operator(const DeformedFrame& df);
ShapeComparison deformed_shape_operator(const Chart& chart, std::span<const double> u, const GHPairData& gh);

/// Max over coordinate pairs (i, j) and basis pairs p < q of the difference of
/// 2x2 minors of (Q A~ e_i, Q A~ e_j) and (A e_i, A e_j), both expressed in a
/// g-orthonormal basis of the tangent space.
double wedge_identity_residual(const geometry::PointFrame& frame, const Mat& q, const Mat& a_tilde, int sign);

/// Largest principal angle between ker A and ker A~. Throws ConstraintError
/// with both ranks when they differ.
double kernel_match_residual(const geometry::PointFrame& frame, const Mat& a_tilde, double tol = 1e-9);

/// min(|N_F - N|, |N_F + N|).
double gauss_map_congruence(const DeformedFrame& df);
double gauss_map_congruence(const Chart& chart, std::span<const double> u, const GHPairData& gh);

/// Axis-aligned rectangle spanned by two coordinate axes; the other
/// coordinates are taken from `lo`.
struct LoopRect {
  std::vector<double> lo;
  int axis_a = 0;
  int axis_b = 1;
  double hi_a = 0.0;
  double hi_b = 0.0;
};

/// Signed loop integrals of omega_i = <df o Q, e_i>, i over ambient axes. The
/// loop runs lo -> (lo_a, hi_b) -> (hi_a, hi_b) -> (hi_a, lo_b) -> lo, which is
/// the staircase with axis_b first minus the staircase with axis_a first.
std::vector<double> omega_loop_integrals(const Chart& chart, const codazzi::CodazziSpec& spec, const LoopRect& rect,
                                         const quadrature::AdaptiveOptions& options = {});
/// max_i |loop integral of omega_i|.
double omega_loop_residual(const Chart& chart, const codazzi::CodazziSpec& spec, const LoopRect& rect,
                           const quadrature::AdaptiveOptions& options = {});

/// Integral of X -> J Q X along the staircase from base to target, moving
/// along the axes in `axis_order` (default 0, 1, ..., n - 1).
std::vector<double> integrate_F(const Chart& chart, const codazzi::CodazziSpec& spec, std::span<const double> base,
                                std::span<const double> target, std::span<const int> axis_order = {},
                                const quadrature::AdaptiveOptions& options = {});

struct PathRealization {
  double metric_residual = 0.0;        // max |<d_i F, d_j F> - (g Q^2)_ij|
  double differential_residual = 0.0;  // max |d_i F - J Q e_i|
};

/// Realization check for specs without a closed form: F is the staircase
/// integral from `base`, differentiated at u by Richardson-extrapolated
/// central differences with the given step.
PathRealization path_realization_check(const Chart& chart, const codazzi::CodazziSpec& spec,
                                       std::span<const double> base, std::span<const double> u, double step = 1e-3);

enum class Method { ClosedForm, PathIntegral };

/// F sampled on a grid; values[flat grid index] in R^(n+1).
struct DeformedImmersion {
  Method method = Method::ClosedForm;
  SampleGrid grid;
  std::vector<std::vector<double>> values;
  std::vector<double> base_point;  // PathIntegral only: the grid's low corner
  int sign = 1;
};

DeformedImmersion sample_closed_form(const Chart& chart, const SampleGrid& grid, const GHPairData& gh);
/// Cumulative staircase integration along grid lines from the low corner,
/// axes visited in `axis_order`.
DeformedImmersion sample_path_integral(const Chart& chart, const codazzi::CodazziSpec& spec, const SampleGrid& grid,
                                       std::span<const int> axis_order = {},
                                       const quadrature::AdaptiveOptions& options = {});

struct ExtractOptions {
  double closedness_tol = 1e-6;
  // on max |h - h(base) + integral of b(Z, .)| over the grid
  double constraint_tol = 1e-5;
};

struct Extraction {
  GHPairData pair;               // sampled; g at the low corner is 0
  double closedness_residual = 0.0;
  double constraint_residual = 0.0;
};

/// Splits each sample as F = df(Z) + h N and integrates <Z, .>_g along grid
/// lines with interpolatory weights. Needs at least 9 nodes per axis; fields
/// that vary too fast for the grid fail the constraint check. Throws ConstraintError when the
/// form is not closed or the recovered pair breaks the gradient constraint.
Extraction extract_gh(const Chart& chart, const DeformedImmersion& samples, const ExtractOptions& options = {});

struct GaugeFit {
  std::vector<double> a;  // R^(n+1)
  double c = 0.0;
  double residual = 0.0;  // max absolute misfit
  double condition = 0.0;  // of the normal equations
};

/// Least-squares (a, c) with g2 - g1 = <f, a> + c and h2 - h1 = <N, a> over
/// the grid. Throws NumericalError when the normal equations are singular.
GaugeFit gh_uniqueness_fit(const GHPairData& pair1, const GHPairData& pair2, const Chart& chart,
                           const SampleGrid& grid);

/// g and h of a pair at every grid node.
SampledPair sample_pair(const Chart& chart, const SampleGrid& grid, const GHPairData& pair);

}  // namespace isodeform::deformation
