#include "isodeform/codazzi.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::codazzi {

using geometry::ImmersionJets;
using jet::JetScalar;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string point_text(std::span<const double> u) {
  std::string s;
  for (std::size_t i = 0; i < u.size(); ++i) s += fmt::format("{}{}", i ? "," : "", u[i]);
  return s;
}

// A Q whose entries are all rounding noise passes any relative test, hence
// the absolute floor on sigma_max.
constexpr double kZeroQ = 1e-12;

void check_nonsingular(const Mat& q, std::span<const double> u, double tol) {
  const auto s = linalg::svd_rank_kernel(q, 0.0);
  if (!(s.singular_values.back() > tol * s.singular_values.front()) || !(s.singular_values.front() > kZeroQ))
    throw HypothesisError(fmt::format("Q is singular at u = ({}): sigma_min = {:.3e}, sigma_max = {:.3e}",
                                      point_text(u), s.singular_values.back(), s.singular_values.front()));
}

Tensor3<double> tensor_values(const JetTensor3& t, int n) {
  Tensor3<double> out(n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) out(a, b, c) = t(a, b, c).value();
  return out;
}

// Shared checks for every evaluation entry point.
void check_spec(const ImmersionJets& im, const JetMatrix& q, std::span<const double> u, const CodazziSpec& spec,
                const EvalOptions& options, double* constraint) {
  const Mat qv = jetmat::values(q);
  check_nonsingular(qv, u, options.singular_tol);
  if (const auto* gh = std::get_if<GHPair>(&spec)) {
    const double r = gh_constraint_residual(im, u, *gh);
    if (constraint) *constraint = r;
    if (!(r < options.constraint_tol))
      throw ConstraintError(fmt::format("A(grad g) = -grad h fails at u = ({}): residual {:.3e} > {:.1e}",
                                        point_text(u), r, options.constraint_tol));
  }
  if (std::holds_alternative<Explicit>(spec)) {
    const Mat g = jetmat::values(im.metric.metric);
    const double r = geometry::self_adjoint_residual(g, qv);
    if (!(r <= options.self_adjoint_tol * std::max(1.0, g.max_abs() * qv.max_abs())))
      throw ConstraintError(fmt::format("explicit Q is not self-adjoint at u = ({}): |gQ - Q^T g| = {:.3e}",
                                        point_text(u), r));
  }
}

JetMatrix deformed_metric_jets(const ImmersionJets& im, const JetMatrix& q) {
  return jetmat::product(im.metric.metric, jetmat::product(q, q));
}

}  // namespace

std::string describe(const CodazziSpec& spec) {
  return std::visit(Overloaded{
                        [](const Parallel& p) { return fmt::format("parallel(t={})", p.t); },
                        [](const GHPair& p) { return fmt::format("gh(g={}, h={})", p.g.label(), p.h.label()); },
                        [](const MinusA&) { return std::string("minusA"); },
                        [](const Explicit& e) {
                          std::string s = "explicit(";
                          for (std::size_t i = 0; i < e.entries.size(); ++i)
                            s += fmt::format("{}{}", i ? ", " : "", e.entries[i].source());
                          return s + ")";
                        },
                    },
                    spec);
}

JetMatrix codazzi_jets(const ImmersionJets& im, std::span<const double> u, const CodazziSpec& spec) {
  const int n = im.n;
  const int k = im.order - 2;
  return std::visit(
      Overloaded{
          [&](const Parallel& p) { return jetmat::sum(jetmat::identity(n, n, k), im.shape, -p.t); },
          [&](const MinusA&) { return jetmat::scaled(im.shape, -1.0); },
          [&](const GHPair& p) {
            const auto hess = geometry::grad_hess(im, p.g.jet(im, u)).hess;
            return jetmat::sum(hess, jetmat::scaled(im.shape, p.h.jet(im, u)), -1.0);
          },
          [&](const Explicit& e) {
            if (static_cast<int>(e.entries.size()) != n * n)
              throw DimensionError(fmt::format("explicit Q needs {} entries, got {}", n * n, e.entries.size()));
            JetMatrix q(n, n, JetScalar(n, k));
            for (int r = 0; r < n; ++r)
              for (int c = 0; c < n; ++c) q(r, c) = expr::eval_jet(e.entries[r * n + c], u, im.order).truncated(k);
            return q;
          },
      },
      spec);
}

double gh_constraint_residual(const ImmersionJets& im, std::span<const double> u, const GHPair& pair) {
  const int n = im.n;
  const JetScalar gj = pair.g.jet(im, u);
  const JetScalar hj = pair.h.jet(im, u);
  const Mat ginv = jetmat::values(im.metric.inverse);
  const Mat a = jetmat::values(im.shape);
  std::vector<double> dg(n), dh(n);
  for (int l = 0; l < n; ++l) {
    dg[l] = gj.d1(l);
    dh[l] = hj.d1(l);
  }
  const auto grad_g = ginv * dg;
  const auto grad_h = ginv * dh;
  auto r = a * grad_g;
  for (int k = 0; k < n; ++k) r[k] += grad_h[k];
  return geometry::g_norm(jetmat::values(im.metric.metric), r);
}

CodazziFrame eval_codazzi(const Chart& chart, std::span<const double> u, const CodazziSpec& spec, int order,
                          const EvalOptions& options) {
  if (!chart.domain.contains(u)) throw DimensionError(fmt::format("chart '{}': point outside the domain", chart.label));
  if (std::holds_alternative<GHPair>(spec)) order = std::max(order, 3);
  return eval_codazzi(geometry::chart_jets(chart, u, std::max(order, 2)), u, spec, options);
}

CodazziFrame eval_codazzi(const ImmersionJets& im, std::span<const double> u, const CodazziSpec& spec,
                          const EvalOptions& options) {
  const JetMatrix q = codazzi_jets(im, u, spec);
  CodazziFrame out;
  check_spec(im, q, u, spec, options, &out.constraint_residual);
  out.Q = jetmat::values(q);
  out.Q_inv = linalg::inverse(out.Q);
  if (jetmat::min_order(q) >= 1) {
    const int n = im.n;
    out.dQ = Tensor3<double>(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) out.dQ(i, k, j) = q(k, j).d1(i);
    out.nablaQ = tensor_values(geometry::covariant_derivative(q, im.metric.gamma), n);
  }
  return out;
}

double codazzi_residual_Q(const Chart& chart, std::span<const double> u, const CodazziSpec& spec,
                          const EvalOptions& options) {
  const CodazziFrame cf = eval_codazzi(chart, u, spec, 3, options);
  const geometry::PointFrame fr = geometry::frame_at(chart, u, 2);
  const int n = chart.n;
  double worst = 0;
  std::vector<double> diff(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < n; ++k) diff[k] = cf.nablaQ(i, k, j) - cf.nablaQ(j, k, i);
      worst = std::max(worst, geometry::g_norm(fr.g, diff));
    }
  return worst;
}

double commutator_residual(const geometry::PointFrame& frame, const Mat& q) {
  return (q * frame.A - frame.A * q).max_abs();
}

Mat deformed_metric(const geometry::PointFrame& frame, const Mat& q) {
  const Mat gt = frame.g * (q * q);
  const double scale = gt.max_abs();
  if ((gt - gt.transposed()).max_abs() > 1e-9 * std::max(1.0, scale))
    throw ConstraintError("deformed metric g Q^2 is not symmetric (Q is not g-self-adjoint)");
  // Sylvester's criterion on the symmetrized matrix
  for (int m = 1; m <= gt.rows(); ++m) {
    Mat lead(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) lead(i, j) = 0.5 * (gt(i, j) + gt(j, i));
    if (!(linalg::determinant(lead) > 0))
      throw ConstraintError("deformed metric g Q^2 is not positive definite");
  }
  return gt;
}

double deformed_connection_residual(const Chart& chart, std::span<const double> u, const CodazziSpec& spec,
                                    const EvalOptions& options) {
  const ImmersionJets im = geometry::chart_jets(chart, u, 3);
  const JetMatrix q = codazzi_jets(im, u, spec);
  check_spec(im, q, u, spec, options, nullptr);
  const int n = im.n;
  const auto tilde = geometry::metric_geometry(deformed_metric_jets(im, q));

  const Mat qinv = linalg::inverse(jetmat::values(q));
  const Mat qv = jetmat::values(q);
  double scale = 1.0, worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(tilde.gamma(k, i, j).value()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // nabla_i (Q e_j) in coordinates
      std::vector<double> v(n);
      for (int m = 0; m < n; ++m) {
        v[m] = q(m, j).d1(i);
        for (int l = 0; l < n; ++l) v[m] += im.metric.gamma(m, i, l).value() * qv(l, j);
      }
      const auto predicted = qinv * v;
      for (int k = 0; k < n; ++k)
        worst = std::max(worst, std::abs(tilde.gamma(k, i, j).value() - predicted[k]));
    }
  return worst / scale;
}

double deformed_curvature_residual(const Chart& chart, std::span<const double> u, const CodazziSpec& spec,
                                   const EvalOptions& options) {
  const ImmersionJets im = geometry::chart_jets(chart, u, 4);
  const JetMatrix q = codazzi_jets(im, u, spec);
  check_spec(im, q, u, spec, options, nullptr);
  const int n = im.n;
  const JetMatrix gt = deformed_metric_jets(im, q);
  const auto tilde = geometry::metric_geometry(gt);
  const JetTensor4 r_tilde = geometry::curvature(tilde.gamma);
  const JetTensor4 r = geometry::curvature(im.metric.gamma);
  const Mat qv = jetmat::values(q);
  const Mat qinv = linalg::inverse(qv);
  const Mat gtv = jetmat::values(gt);
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat rij(n, n);
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) rij(l, k) = r(l, k, i, j).value();
      const Mat predicted = qinv * rij * qv;
      for (int k = 0; k < n; ++k) {
        std::vector<double> diff(n);
        for (int l = 0; l < n; ++l) diff[l] = r_tilde(l, k, i, j).value() - predicted(l, k);
        worst = std::max(worst, geometry::g_norm(gtv, diff));
      }
    }
  return worst;
}

double deformed_shape_codazzi_residual(const Chart& chart, std::span<const double> u, const CodazziSpec& spec,
                                       const EvalOptions& options) {
  const ImmersionJets im = geometry::chart_jets(chart, u, 3);
  const JetMatrix q = codazzi_jets(im, u, spec);
  check_spec(im, q, u, spec, options, nullptr);
  const int n = im.n;
  const JetMatrix gt = deformed_metric_jets(im, q);
  const auto tilde = geometry::metric_geometry(gt);
  const JetMatrix shape_tilde = jetmat::product(jetmat::inverse(q), im.shape);
  const JetTensor3 nabla = geometry::covariant_derivative(shape_tilde, tilde.gamma);
  const Mat gtv = jetmat::values(gt);
  double worst = 0;
  std::vector<double> diff(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < n; ++k) diff[k] = nabla(i, k, j).value() - nabla(j, k, i).value();
      worst = std::max(worst, geometry::g_norm(gtv, diff));
    }
  return worst;
}

}  // namespace isodeform::codazzi
