#include "isodeform/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::geometry {

namespace {

std::vector<double> box_center(const Box& box) {
  std::vector<double> c(box.dim());
  for (int i = 0; i < box.dim(); ++i) c[i] = 0.5 * (box.lo[i] + box.hi[i]);
  return c;
}

}  // namespace

Chart Chart::from_strings(std::string label, const std::vector<std::string>& components, Box domain) {
  Chart chart;
  chart.label = std::move(label);
  chart.n = static_cast<int>(components.size()) - 1;
  if (chart.n < 1) throw DimensionError("chart: need at least two components");
  for (const auto& text : components) chart.components.push_back(expr::parse(text, chart.n));
  chart.domain = std::move(domain);
  chart.validate();
  return chart;
}

void Chart::validate() const {
  if (n < 1 || static_cast<int>(components.size()) != n + 1)
    throw DimensionError(fmt::format("chart '{}': {} components for n = {}", label, components.size(), n));
  for (const auto& c : components)
    if (c.n_vars() != n) throw DimensionError(fmt::format("chart '{}': component over the wrong variables", label));
  if (domain.dim() != n || static_cast<int>(domain.hi.size()) != n)
    throw DimensionError(fmt::format("chart '{}': domain has dimension {}, expected {}", label, domain.dim(), n));
  for (int i = 0; i < n; ++i)
    if (!(domain.hi[i] > domain.lo[i]))
      throw DimensionError(fmt::format("chart '{}': degenerate domain on axis {}", label, i + 1));
  frame_at(*this, box_center(domain), 2);
}

MetricJets metric_geometry(const JetMatrix& metric) {
  const int n = metric.rows();
  const int m = jetmat::min_order(metric);
  if (m < 1) throw DimensionError("metric_geometry: metric jets of order >= 1 required");
  MetricJets out{jetmat::truncated(metric, m), jetmat::inverse(metric), {}};
  const int n_vars = metric(0, 0).n_vars();
  std::vector<JetMatrix> dg;
  for (int k = 0; k < n; ++k) dg.push_back(jetmat::partial(out.metric, k));
  const JetMatrix inv = jetmat::truncated(out.inverse, m - 1);
  out.gamma = JetTensor3(n, JetScalar(n_vars, m - 1));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      // lowered symbol [ij, l]
      std::vector<JetScalar> lowered;
      for (int l = 0; l < n; ++l) lowered.push_back((dg[i](j, l) + dg[j](i, l) - dg[l](i, j)) * 0.5);
      for (int k = 0; k < n; ++k) {
        JetScalar acc(n_vars, m - 1);
        for (int l = 0; l < n; ++l) acc += inv(k, l) * lowered[l];
        out.gamma(k, i, j) = acc;
        out.gamma(k, j, i) = acc;
      }
    }
  return out;
}

JetTensor4 curvature(const JetTensor3& gamma_in) {
  const int n_vars = gamma_in(0, 0, 0).n_vars();
  const int p = gamma_in(0, 0, 0).order();
  if (p < 1) throw DimensionError("curvature: Christoffel jets of order >= 1 required");
  const int n = n_vars;
  JetTensor3 gamma(n, JetScalar(n_vars, p - 1));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) gamma(a, b, c) = gamma_in(a, b, c).truncated(p - 1);
  JetTensor4 r(n, JetScalar(n_vars, p - 1));
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          JetScalar acc = gamma_in(l, j, k).partial(i) - gamma_in(l, i, k).partial(j);
          for (int m = 0; m < n; ++m) acc += gamma(l, i, m) * gamma(m, j, k) - gamma(l, j, m) * gamma(m, i, k);
          r(l, k, j, i) = -acc;
          r(l, k, i, j) = std::move(acc);
        }
  return r;
}

JetTensor3 covariant_derivative(const JetMatrix& t, const JetTensor3& gamma_in) {
  const int n = t.rows();
  const int n_vars = t(0, 0).n_vars();
  const int q = jetmat::min_order(t);
  const int r = std::min(q - 1, gamma_in(0, 0, 0).order());
  if (r < 0) throw DimensionError("covariant_derivative: tensor jets of order >= 1 required");
  const JetMatrix tr = jetmat::truncated(t, r);
  JetTensor3 out(n, JetScalar(n_vars, r));
  for (int i = 0; i < n; ++i) {
    const JetMatrix dt = jetmat::truncated(jetmat::partial(t, i), r);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        JetScalar acc = dt(k, j);
        for (int l = 0; l < n; ++l) {
          acc += gamma_in(k, i, l).truncated(r) * tr(l, j);
          acc -= gamma_in(l, i, j).truncated(r) * tr(k, l);
        }
        out(i, k, j) = std::move(acc);
      }
  }
  return out;
}

ImmersionJets analyze_immersion(std::vector<JetScalar> components) {
  ImmersionJets im;
  im.n = static_cast<int>(components.size()) - 1;
  if (im.n < 1) throw DimensionError("analyze_immersion: need at least two components");
  const int n = im.n;
  const int K = components[0].order();
  const int n_vars = components[0].n_vars();
  if (n_vars != n) throw DimensionError("analyze_immersion: jets must be over n variables");
  if (K < 2) throw DimensionError("analyze_immersion: order >= 2 required");
  for (const auto& c : components)
    if (c.order() != K || c.n_vars() != n_vars) throw DimensionError("analyze_immersion: mismatched component jets");
  im.order = K;
  im.f = std::move(components);

  im.jacobian = JetMatrix(n + 1, n, JetScalar(n, K - 1));
  for (int a = 0; a <= n; ++a)
    for (int i = 0; i < n; ++i) im.jacobian(a, i) = im.f[a].partial(i);

  // generalized cross product of the columns
  std::vector<JetScalar> cross;
  JetMatrix minor(n, n, JetScalar(n, K - 1));
  for (int k = 0; k <= n; ++k) {
    for (int r = 0, rr = 0; r <= n; ++r) {
      if (r == k) continue;
      for (int c = 0; c < n; ++c) minor(rr, c) = im.jacobian(r, c);
      ++rr;
    }
    JetScalar d = jetmat::determinant(minor);
    cross.push_back(k % 2 == 0 ? d : -d);
  }
  JetScalar len2(n, K - 1);
  for (const auto& v : cross) len2 += v * v;
  double column_scale = 1.0;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int a = 0; a <= n; ++a) s += im.jacobian(a, i).value() * im.jacobian(a, i).value();
    column_scale *= std::sqrt(s);
  }
  if (!(std::sqrt(len2.value()) > 1e-12 * column_scale))
    throw HypothesisError("degenerate Jacobian: immersion fails at this point");
  const JetScalar inv_len = jet::pow(len2, -0.5);
  for (auto& v : cross) im.normal.push_back(v * inv_len);

  JetMatrix metric(n, n, JetScalar(n, K - 1));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      JetScalar acc(n, K - 1);
      for (int a = 0; a <= n; ++a) acc += im.jacobian(a, i) * im.jacobian(a, j);
      metric(i, j) = acc;
      metric(j, i) = acc;
    }
  im.metric = metric_geometry(metric);

  im.second_form = JetMatrix(n, n, JetScalar(n, K - 2));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      JetScalar acc(n, K - 2);
      for (int a = 0; a <= n; ++a) acc += im.jacobian(a, i).partial(j) * im.normal[a].truncated(K - 2);
      im.second_form(i, j) = acc;
      im.second_form(j, i) = acc;
    }
  im.shape = jetmat::product(im.metric.inverse, im.second_form);
  return im;
}

ImmersionJets chart_jets(const Chart& chart, std::span<const double> u, int order) {
  if (static_cast<int>(u.size()) != chart.n)
    throw DimensionError(fmt::format("chart '{}': point has {} coordinates, expected {}", chart.label, u.size(), chart.n));
  std::vector<JetScalar> comps;
  for (const auto& c : chart.components) comps.push_back(expr::eval_jet(c, u, order));
  return analyze_immersion(std::move(comps));
}

PointFrame frame_from_jets(const ImmersionJets& im, std::span<const double> u) {
  const int n = im.n;
  const int K = im.order;
  PointFrame fr;
  fr.n = n;
  fr.order = K;
  fr.u.assign(u.begin(), u.end());
  for (const auto& c : im.f) fr.f.push_back(c.value());
  fr.J = jetmat::values(im.jacobian);
  fr.d2f = Tensor3<double>(n + 1, n, n, 0.0);
  for (int a = 0; a <= n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) fr.d2f(a, i, j) = im.f[a].d2(i, j);
  if (K >= 3) {
    for (int a = 0; a <= n; ++a) {
      Tensor3<double> t(n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) t(i, j, k) = im.f[a].d3(i, j, k);
      fr.d3f.push_back(std::move(t));
    }
  }
  for (const auto& c : im.normal) fr.N.push_back(c.value());
  fr.dN = Mat(n + 1, n);
  for (int a = 0; a <= n; ++a)
    for (int i = 0; i < n; ++i) fr.dN(a, i) = im.normal[a].d1(i);
  fr.g = jetmat::values(im.metric.metric);
  fr.g_inv = jetmat::values(im.metric.inverse);
  fr.dg = Tensor3<double>(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) fr.dg(k, i, j) = im.metric.metric(i, j).d1(k);
  fr.b = jetmat::values(im.second_form);
  fr.A = jetmat::values(im.shape);
  fr.Gamma = Tensor3<double>(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) fr.Gamma(k, i, j) = im.metric.gamma(k, i, j).value();
  if (K >= 3) {
    const JetTensor4 r = curvature(im.metric.gamma);
    fr.R = Tensor4<double>(n, 0.0);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) fr.R(l, k, i, j) = r(l, k, i, j).value();
    const JetTensor3 na = covariant_derivative(im.shape, im.metric.gamma);
    fr.nablaA = Tensor3<double>(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) fr.nablaA(i, k, j) = na(i, k, j).value();
  }
  const auto s = linalg::svd_rank_kernel(fr.g, 0.0);
  if (!(s.singular_values.back() > 1e-14 * s.singular_values.front()) ||
      self_adjoint_residual(Mat::identity(n), fr.g) > 1e-12 * fr.g.max_abs())
    throw HypothesisError("metric is not positive definite");
  return fr;
}

PointFrame frame_at(const Chart& chart, std::span<const double> u, int order) {
  if (!chart.domain.contains(u))
    throw DimensionError(fmt::format("chart '{}': point outside the domain", chart.label));
  if (order < 2) throw DimensionError("frame_at: order >= 2 required");
  return frame_from_jets(chart_jets(chart, u, order), u);
}

double g_norm(const Mat& g, std::span<const double> v) {
  const auto gv = g * v;
  return std::sqrt(std::max(0.0, linalg::dot(v, gv)));
}

double self_adjoint_residual(const Mat& g, const Mat& t) {
  return (g * t - t.transposed() * g).max_abs();
}

double weingarten_residual(const PointFrame& fr) { return weingarten_residual(fr, fr.A); }

double weingarten_residual(const PointFrame& fr, const Mat& shape) {
  const Mat ja = fr.J * shape;
  double worst = 0;
  for (int i = 0; i < fr.n; ++i) {
    double s = 0;
    for (int a = 0; a <= fr.n; ++a) {
      const double d = fr.dN(a, i) + ja(a, i);
      s += d * d;
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

double weingarten_residual(const Chart& chart, std::span<const double> u) {
  return weingarten_residual(frame_at(chart, u, 2));
}

double gauss_residual(const PointFrame& fr) {
  if (!fr.has_curvature()) throw DimensionError("gauss_residual: frame of order >= 3 required");
  const int n = fr.n;
  double worst = 0;
  std::vector<double> diff(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // <A e_j, e_k>_g = b_jk
        const double bjk = fr.b(j, k), bik = fr.b(i, k);
        for (int l = 0; l < n; ++l) diff[l] = fr.R(l, k, i, j) - (bjk * fr.A(l, i) - bik * fr.A(l, j));
        worst = std::max(worst, g_norm(fr.g, diff));
      }
  return worst;
}

double codazzi_residual_A(const PointFrame& fr) {
  if (!fr.has_curvature()) throw DimensionError("codazzi_residual_A: frame of order >= 3 required");
  const int n = fr.n;
  double worst = 0;
  std::vector<double> diff(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < n; ++k) diff[k] = fr.nablaA(i, k, j) - fr.nablaA(j, k, i);
      worst = std::max(worst, g_norm(fr.g, diff));
    }
  return worst;
}

double metric_compatibility_residual(const PointFrame& fr) {
  const int n = fr.n;
  double worst = 0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double r = fr.dg(k, i, j);
        for (int l = 0; l < n; ++l) r -= fr.Gamma(l, k, i) * fr.g(l, j) + fr.Gamma(l, k, j) * fr.g(i, l);
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

double bianchi_residual(const PointFrame& fr) {
  if (!fr.has_curvature()) throw DimensionError("bianchi_residual: frame of order >= 3 required");
  const int n = fr.n;
  double worst = 0;
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          worst = std::max(worst, std::abs(fr.R(l, k, i, j) + fr.R(l, i, j, k) + fr.R(l, j, k, i)));
  return worst;
}

AmbientSplit decompose_ambient(const PointFrame& fr, std::span<const double> z) {
  if (static_cast<int>(z.size()) != fr.n + 1) throw DimensionError("decompose_ambient: wrong ambient dimension");
  AmbientSplit out;
  out.normal = linalg::dot(z, fr.N);
  std::vector<double> rest(z.begin(), z.end());
  for (int a = 0; a <= fr.n; ++a) rest[a] -= out.normal * fr.N[a];
  out.tangent = linalg::solve(fr.g, fr.J.transposed() * rest);
  return out;
}

GradHessJets grad_hess(const ImmersionJets& im, const JetScalar& s) {
  const int n = im.n;
  if (s.order() < 2) throw DimensionError("grad_hess: scalar jets of order >= 2 required");
  std::vector<JetScalar> ds;
  for (int l = 0; l < n; ++l) ds.push_back(s.partial(l));
  GradHessJets out;
  const int go = std::min(s.order() - 1, jetmat::min_order(im.metric.inverse));
  for (int k = 0; k < n; ++k) {
    JetScalar acc(n, go);
    for (int l = 0; l < n; ++l) acc += im.metric.inverse(k, l).truncated(go) * ds[l].truncated(go);
    out.grad.push_back(std::move(acc));
  }
  const int ho = std::min(s.order() - 2, im.metric.gamma(0, 0, 0).order());
  // covariant Hessian, lowered: H_il = d_i d_l s - Gamma^m_il d_m s
  JetMatrix lowered(n, n, JetScalar(n, ho));
  for (int i = 0; i < n; ++i)
    for (int l = i; l < n; ++l) {
      JetScalar acc = ds[l].partial(i).truncated(ho);
      for (int m = 0; m < n; ++m) acc -= im.metric.gamma(m, i, l).truncated(ho) * ds[m].truncated(ho);
      lowered(i, l) = acc;
      lowered(l, i) = acc;
    }
  out.hess = jetmat::product(im.metric.inverse, lowered);
  return out;
}

GradHess scalar_grad_hess(const Chart& chart, std::span<const double> u, const expr::ExprAst& s, int order) {
  order = std::max(order, 2);
  const ImmersionJets im = chart_jets(chart, u, order);
  const GradHessJets gh = grad_hess(im, expr::eval_jet(s, u, order));
  GradHess out;
  for (const auto& x : gh.grad) out.grad.push_back(x.value());
  out.hess = jetmat::values(gh.hess);
  return out;
}

int rank_A(const PointFrame& frame, double tol) { return linalg::svd_rank_kernel(frame.A, tol).rank; }

FiniteDifferenceFrame fd_oracle(const Chart& chart, std::span<const double> u) {
  const int n = chart.n;
  for (int i = 0; i < n; ++i)
    if (u[i] - chart.domain.lo[i] <= kFdSecondStep || chart.domain.hi[i] - u[i] <= kFdSecondStep)
      throw DimensionError("fd_oracle: point too close to the domain boundary");
  std::vector<double> p(u.begin(), u.end());
  auto eval_at = [&](const std::vector<double>& x) {
    std::vector<double> out;
    for (const auto& c : chart.components) out.push_back(expr::evaluate(c, x));
    return out;
  };
  auto shifted = [&](int i, double hi, int j, double hj) {
    std::vector<double> x = p;
    x[i] += hi;
    if (j >= 0) x[j] += hj;
    return eval_at(x);
  };

  FiniteDifferenceFrame out;
  out.f = eval_at(p);
  out.J = Mat(n + 1, n);
  out.d2f = Tensor3<double>(n + 1, n, n, 0.0);

  for (int i = 0; i < n; ++i) {
    auto central = [&](double h) {
      const auto plus = shifted(i, h, -1, 0), minus = shifted(i, -h, -1, 0);
      std::vector<double> d(n + 1);
      for (int a = 0; a <= n; ++a) d[a] = (plus[a] - minus[a]) / (2 * h);
      return d;
    };
    const auto coarse = central(kFdStep), fine = central(kFdStep / 2);
    for (int a = 0; a <= n; ++a) out.J(a, i) = (4 * fine[a] - coarse[a]) / 3;
  }

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto second = [&](double h) {
        std::vector<double> d(n + 1);
        if (i == j) {
          const auto plus = shifted(i, h, -1, 0), minus = shifted(i, -h, -1, 0);
          for (int a = 0; a <= n; ++a) d[a] = (plus[a] - 2 * out.f[a] + minus[a]) / (h * h);
        } else {
          const auto pp = shifted(i, h, j, h), pm = shifted(i, h, j, -h);
          const auto mp = shifted(i, -h, j, h), mm = shifted(i, -h, j, -h);
          for (int a = 0; a <= n; ++a) d[a] = (pp[a] - pm[a] - mp[a] + mm[a]) / (4 * h * h);
        }
        return d;
      };
      const auto coarse = second(kFdSecondStep), fine = second(kFdSecondStep / 2);
      for (int a = 0; a <= n; ++a) {
        const double v = (4 * fine[a] - coarse[a]) / 3;
        out.d2f(a, i, j) = v;
        out.d2f(a, j, i) = v;
      }
    }
  return out;
}

ScalarField ScalarField::expression(expr::ExprAst ast) {
  ScalarField s;
  s.label_ = ast.source().empty() ? expr::print(ast) : ast.source();
  s.ast_ = ast;
  s.fn_ = [ast](const ImmersionJets& im, std::span<const double> u) { return expr::eval_jet(ast, u, im.order); };
  return s;
}

ScalarField ScalarField::derived(std::string label, JetFn fn) {
  ScalarField s;
  s.label_ = std::move(label);
  s.fn_ = std::move(fn);
  return s;
}

JetScalar ScalarField::jet(const ImmersionJets& im, std::span<const double> u) const { return fn_(im, u); }

}  // namespace isodeform::geometry
