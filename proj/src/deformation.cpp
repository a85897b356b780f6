#include "isodeform/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::deformation {

using geometry::ImmersionJets;
using geometry::ScalarField;
using jet::JetScalar;

namespace {

const codazzi::GHPair& require_fields(const GHPairData& gh) {
  if (!gh.fields) throw DimensionError("(g, h) pair is only known on samples; no closed form available");
  return *gh.fields;
}

std::vector<int> default_order(int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

// J Q e_axis at v, from second-order jets.
std::vector<double> omega_column(const Chart& chart, const codazzi::CodazziSpec& spec, std::span<const double> v,
                                 int axis) {
  const ImmersionJets im = geometry::chart_jets(chart, v, 2);
  const Mat q = jetmat::values(codazzi::codazzi_jets(im, v, spec));
  const Mat j = jetmat::values(im.jacobian);
  std::vector<double> qe(chart.n);
  for (int k = 0; k < chart.n; ++k) qe[k] = q(k, axis);
  return j * qe;
}

std::vector<double> segment_integral(const Chart& chart, const codazzi::CodazziSpec& spec,
                                     std::span<const double> start, int axis, double end,
                                     const quadrature::AdaptiveOptions& options) {
  std::vector<double> v(start.begin(), start.end());
  return quadrature::integrate(
      [&](double s) {
        v[axis] = s;
        return omega_column(chart, spec, v, axis);
      },
      start[axis], end, chart.ambient_dim(), options);
}

// Lower-triangular L with g = L L^T.
Mat cholesky(const Mat& g) {
  const int n = g.rows();
  Mat l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = g(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0)) throw NumericalError("metric is not positive definite");
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

bool same_grid(const SampleGrid& a, const SampleGrid& b) {
  return a.count() == b.count() && a.box().lo == b.box().lo && a.box().hi == b.box().hi;
}

// Cumulative integral of the covariant 1-form w (w[node][axis]) along grid
// lines, axes in `order`, starting from 0 at the low corner.
std::vector<double> integrate_on_grid(const SampleGrid& grid, const std::vector<std::vector<double>>& w,
                                      std::span<const int> order) {
  const int n = grid.dim();
  const int count = grid.count();
  const auto weights = quadrature::cumulative_weights(count);
  std::vector<double> out(grid.size(), 0.0);
  for (int s = 0; s < n; ++s) {
    const int ax = order[s];
    const double h = (grid.box().hi[ax] - grid.box().lo[ax]) / (count - 1);
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
      auto idx = grid.multi_index(flat);
      bool reached = idx[ax] > 0;
      for (int t = s + 1; t < n; ++t) reached = reached && idx[order[t]] == 0;
      if (!reached) continue;
      const int m = idx[ax];
      idx[ax] = 0;
      const double start = out[grid.flat_index(idx)];
      double sum = 0;
      for (int j = 0; j < count; ++j) {
        idx[ax] = j;
        sum += weights[m][j] * w[grid.flat_index(idx)][ax];
      }
      out[flat] = start + h * sum;
    }
  }
  return out;
}

}  // namespace

codazzi::CodazziSpec GHPairData::spec() const {
  if (!fields) throw DimensionError("(g, h) pair is only known on samples; no Codazzi spec available");
  return *fields;
}

GHPairData gh_from_example5(const Chart& chart, double t) {
  std::string g = "0.5*(";
  for (std::size_t a = 0; a < chart.components.size(); ++a)
    g += fmt::format("{}({})^2", a ? " + " : "", expr::print(chart.components[a]));
  g += ")";
  GHPairData out;
  out.provenance = Provenance::Example5;
  out.t = t;
  auto h = ScalarField::derived(fmt::format("<f,N> + {}", t), [t](const ImmersionJets& im, std::span<const double>) {
    const int k = im.order - 1;
    JetScalar s = JetScalar::constant(t, im.n, k);
    for (std::size_t a = 0; a < im.f.size(); ++a) s = s + im.f[a].truncated(k) * im.normal[a];
    return s;
  });
  out.fields = codazzi::GHPair{ScalarField::expression(expr::parse(g, chart.n)), std::move(h)};
  return out;
}

GHPairData gh_from_example6(const Chart& chart, std::span<const double> a) {
  if (static_cast<int>(a.size()) != chart.ambient_dim())
    throw DimensionError(fmt::format("translation vector needs {} entries, got {}", chart.ambient_dim(), a.size()));
  std::string g;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0) continue;
    g += fmt::format("{}({})*({})", g.empty() ? "" : " + ", a[k], expr::print(chart.components[k]));
  }
  if (g.empty()) g = "0";
  GHPairData out;
  out.provenance = Provenance::Example6;
  out.a.assign(a.begin(), a.end());
  std::vector<double> av(a.begin(), a.end());
  auto h = ScalarField::derived("<N,a> + 1", [av](const ImmersionJets& im, std::span<const double>) {
    JetScalar s = JetScalar::constant(1.0, im.n, im.order - 1);
    for (std::size_t k = 0; k < av.size(); ++k) s = s + im.normal[k] * av[k];
    return s;
  });
  out.fields = codazzi::GHPair{ScalarField::expression(expr::parse(g, chart.n)), std::move(h)};
  return out;
}

GHPairData gh_user(codazzi::GHPair pair) {
  GHPairData out;
  out.provenance = Provenance::UserSupplied;
  out.fields = std::move(pair);
  return out;
}

std::vector<JetScalar> closed_form_F_jets(const ImmersionJets& im, std::span<const double> u,
                                          const codazzi::GHPair& pair) {
  const int k = im.order - 1;
  const auto grad = geometry::grad_hess(im, pair.g.jet(im, u)).grad;
  const JetScalar h = pair.h.jet(im, u).truncated(k);
  std::vector<JetScalar> f;
  for (int a = 0; a <= im.n; ++a) {
    JetScalar s = h * im.normal[a];
    for (int i = 0; i < im.n; ++i) s = s + im.jacobian(a, i) * grad[i];
    f.push_back(std::move(s));
  }
  return f;
}

std::vector<double> closed_form_F(const Chart& chart, std::span<const double> u, const GHPairData& gh,
                                  const codazzi::EvalOptions& options) {
  const auto& pair = require_fields(gh);
  if (!chart.domain.contains(u)) throw DimensionError(fmt::format("chart '{}': point outside the domain", chart.label));
  const ImmersionJets im = geometry::chart_jets(chart, u, 2);
  const double r = codazzi::gh_constraint_residual(im, u, pair);
  if (!(r < options.constraint_tol))
    throw ConstraintError(fmt::format("A(grad g) = -grad h fails: residual {:.3e}", r));
  std::vector<double> out;
  for (const auto& c : closed_form_F_jets(im, u, pair)) out.push_back(c.value());
  return out;
}

DeformedFrame deformed_frame(const Chart& chart, std::span<const double> u, const GHPairData& gh, int order,
                             const codazzi::EvalOptions& options) {
  const auto& pair = require_fields(gh);
  if (!chart.domain.contains(u)) throw DimensionError(fmt::format("chart '{}': point outside the domain", chart.label));
  const ImmersionJets im = geometry::chart_jets(chart, u, std::max(order, 4));
  DeformedFrame out;
  out.base = geometry::frame_from_jets(im, u);
  out.codazzi = codazzi::eval_codazzi(im, u, codazzi::CodazziSpec{pair}, options);
  const ImmersionJets fim = geometry::analyze_immersion(closed_form_F_jets(im, u, pair));
  for (const auto& c : fim.f) out.F.push_back(c.value());
  out.dF = jetmat::values(fim.jacobian);
  for (const auto& c : fim.normal) out.normal.push_back(c.value());
  out.metric = jetmat::values(fim.metric.metric);
  out.shape = jetmat::values(fim.shape);
  const JetTensor3 nabla = geometry::covariant_derivative(fim.shape, fim.metric.gamma);
  const int n = im.n;
  out.nabla_shape = Tensor3<double>(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) out.nabla_shape(i, k, j) = nabla(i, k, j).value();
  return out;
}

double metric_realization_residual(const DeformedFrame& df) {
  const Mat& q = df.codazzi.Q;
  return (df.metric - df.base.g * (q * q)).max_abs();
}

double differential_residual(const DeformedFrame& df) { return (df.dF - df.base.J * df.codazzi.Q).max_abs(); }

double shape_codazzi_residual(const DeformedFrame& df) {
  const int n = df.base.n;
  double worst = 0;
  std::vector<double> diff(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < n; ++k) diff[k] = df.nabla_shape(i, k, j) - df.nabla_shape(j, k, i);
      worst = std::max(worst, geometry::g_norm(df.metric, diff));
    }
  return worst;
}

ShapeComparison deformed_shape_operator(const DeformedFrame& df) {
  const Mat b = df.codazzi.Q_inv * df.base.A;
  const double plus = (df.shape - b).max_abs();
  const double minus = (df.shape + b).max_abs();
  ShapeComparison out;
  out.A_tilde = df.shape;
  out.sign = minus < plus ? -1 : 1;
  out.residual = std::min(plus, minus);
  out.metric_residual = metric_realization_residual(df);
  out.self_adjoint_residual = geometry::self_adjoint_residual(df.metric, df.shape);
  return out;
}

ShapeComparison deformed_shape_operator(const Chart& chart, std::span<const double> u, const GHPairData& gh) {
  return deformed_shape_operator(deformed_frame(chart, u, gh));
}

double wedge_identity_residual(const geometry::PointFrame& frame, const Mat& q, const Mat& a_tilde, int sign) {
  const int n = frame.n;
  const Mat lt = cholesky(frame.g).transposed();
  const Mat left = lt * (static_cast<double>(sign) * (q * a_tilde));
  const Mat right = lt * frame.A;
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int p = 0; p < n; ++p)
        for (int r = p + 1; r < n; ++r) {
          const double ml = left(p, i) * left(r, j) - left(r, i) * left(p, j);
          const double mr = right(p, i) * right(r, j) - right(r, i) * right(p, j);
          worst = std::max(worst, std::abs(ml - mr));
        }
  return worst;
}

double kernel_match_residual(const geometry::PointFrame& frame, const Mat& a_tilde, double tol) {
  const auto ka = linalg::svd_rank_kernel(frame.A, tol);
  const auto kt = linalg::svd_rank_kernel(a_tilde, tol);
  if (ka.rank != kt.rank)
    throw ConstraintError(fmt::format("kernel mismatch: rank A = {}, rank A~ = {}", ka.rank, kt.rank));
  if (ka.kernel.cols() == 0) return 0.0;
  return linalg::largest_principal_angle(ka.kernel, kt.kernel);
}

double gauss_map_congruence(const DeformedFrame& df) {
  double plus = 0, minus = 0;
  for (std::size_t a = 0; a < df.normal.size(); ++a) {
    plus += (df.normal[a] - df.base.N[a]) * (df.normal[a] - df.base.N[a]);
    minus += (df.normal[a] + df.base.N[a]) * (df.normal[a] + df.base.N[a]);
  }
  return std::sqrt(std::min(plus, minus));
}

double gauss_map_congruence(const Chart& chart, std::span<const double> u, const GHPairData& gh) {
  return gauss_map_congruence(deformed_frame(chart, u, gh));
}

std::vector<double> integrate_F(const Chart& chart, const codazzi::CodazziSpec& spec, std::span<const double> base,
                                std::span<const double> target, std::span<const int> axis_order,
                                const quadrature::AdaptiveOptions& options) {
  const int n = chart.n;
  if (static_cast<int>(base.size()) != n || static_cast<int>(target.size()) != n)
    throw DimensionError("integrate_F: endpoints must have one entry per chart coordinate");
  const auto order = axis_order.empty() ? default_order(n) : std::vector<int>(axis_order.begin(), axis_order.end());
  std::vector<bool> visited(n, false);
  for (int ax : order) {
    if (ax < 0 || ax >= n || visited[ax]) throw DimensionError("integrate_F: invalid axis order");
    visited[ax] = true;
  }
  for (int ax = 0; ax < n; ++ax)
    if (!visited[ax] && base[ax] != target[ax])
      throw DimensionError(fmt::format("integrate_F: axis {} moves but is not in the axis order", ax + 1));
  std::vector<double> v(base.begin(), base.end());
  std::vector<double> total(chart.ambient_dim(), 0.0);
  for (int ax : order) {
    if (v[ax] == target[ax]) continue;
    const auto piece = segment_integral(chart, spec, v, ax, target[ax], options);
    for (std::size_t a = 0; a < total.size(); ++a) total[a] += piece[a];
    v[ax] = target[ax];
  }
  return total;
}

std::vector<double> omega_loop_integrals(const Chart& chart, const codazzi::CodazziSpec& spec, const LoopRect& rect,
                                         const quadrature::AdaptiveOptions& options) {
  if (rect.axis_a == rect.axis_b) throw DimensionError("loop rectangle needs two distinct axes");
  std::vector<double> target = rect.lo;
  target[rect.axis_a] = rect.hi_a;
  target[rect.axis_b] = rect.hi_b;
  const int b_first[] = {rect.axis_b, rect.axis_a};
  const int a_first[] = {rect.axis_a, rect.axis_b};
  const auto p = integrate_F(chart, spec, rect.lo, target, b_first, options);
  const auto q = integrate_F(chart, spec, rect.lo, target, a_first, options);
  std::vector<double> out(p.size());
  for (std::size_t a = 0; a < p.size(); ++a) out[a] = p[a] - q[a];
  return out;
}

double omega_loop_residual(const Chart& chart, const codazzi::CodazziSpec& spec, const LoopRect& rect,
                           const quadrature::AdaptiveOptions& options) {
  return linalg::max_abs(omega_loop_integrals(chart, spec, rect, options));
}

PathRealization path_realization_check(const Chart& chart, const codazzi::CodazziSpec& spec,
                                       std::span<const double> base, std::span<const double> u, double step) {
  const int n = chart.n;
  quadrature::AdaptiveOptions tight;
  tight.tol = 1e-13;
  Mat dF(n + 1, n);
  for (int i = 0; i < n; ++i) {
    auto central = [&](double h) {
      std::vector<double> up(u.begin(), u.end()), down(u.begin(), u.end());
      up[i] += h;
      down[i] -= h;
      if (!chart.domain.contains(up) || !chart.domain.contains(down))
        throw DimensionError("path_realization_check: difference stencil leaves the domain");
      const auto fp = integrate_F(chart, spec, base, up, {}, tight);
      const auto fm = integrate_F(chart, spec, base, down, {}, tight);
      std::vector<double> d(n + 1);
      for (int a = 0; a <= n; ++a) d[a] = (fp[a] - fm[a]) / (2 * h);
      return d;
    };
    const auto coarse = central(step);
    const auto fine = central(step / 2);
    for (int a = 0; a <= n; ++a) dF(a, i) = (4 * fine[a] - coarse[a]) / 3;
  }
  const geometry::PointFrame fr = geometry::frame_at(chart, u, 2);
  const Mat q = jetmat::values(codazzi::codazzi_jets(geometry::chart_jets(chart, u, 2), u, spec));
  PathRealization out;
  out.metric_residual = (dF.transposed() * dF - fr.g * (q * q)).max_abs();
  out.differential_residual = (dF - fr.J * q).max_abs();
  return out;
}

DeformedImmersion sample_closed_form(const Chart& chart, const SampleGrid& grid, const GHPairData& gh) {
  DeformedImmersion out;
  out.method = Method::ClosedForm;
  out.grid = grid;
  for (std::size_t k = 0; k < grid.size(); ++k) out.values.push_back(closed_form_F(chart, grid.node(k), gh));
  return out;
}

DeformedImmersion sample_path_integral(const Chart& chart, const codazzi::CodazziSpec& spec, const SampleGrid& grid,
                                       std::span<const int> axis_order, const quadrature::AdaptiveOptions& options) {
  const int n = chart.n;
  const auto order = axis_order.empty() ? default_order(n) : std::vector<int>(axis_order.begin(), axis_order.end());
  if (static_cast<int>(order.size()) != n) throw DimensionError("sample_path_integral: axis order must list every axis");
  DeformedImmersion out;
  out.method = Method::PathIntegral;
  out.grid = grid;
  out.base_point = grid.box().lo;
  out.values.assign(grid.size(), std::vector<double>(chart.ambient_dim(), 0.0));
  for (int s = 0; s < n; ++s) {
    const int ax = order[s];
    for (int m = 1; m < grid.count(); ++m)
      for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        auto idx = grid.multi_index(flat);
        if (idx[ax] != m) continue;
        bool on_stage = true;
        for (int t = s + 1; t < n; ++t) on_stage = on_stage && idx[order[t]] == 0;
        if (!on_stage) continue;
        idx[ax] = m - 1;
        const std::size_t prev = grid.flat_index(idx);
        const auto start = grid.node(prev);
        const auto piece = segment_integral(chart, spec, start, ax, grid.coordinate(ax, m), options);
        for (int a = 0; a <= n; ++a) out.values[flat][a] = out.values[prev][a] + piece[a];
      }
  }
  return out;
}

Extraction extract_gh(const Chart& chart, const DeformedImmersion& samples, const ExtractOptions& options) {
  const SampleGrid& grid = samples.grid;
  const int n = chart.n;
  if (grid.dim() != n) throw DimensionError("extract_gh: grid dimension differs from the chart");
  if (grid.count() < 9) throw DimensionError(fmt::format("extract_gh needs at least 9 nodes per axis, got {}", grid.count()));
  if (samples.values.size() != grid.size()) throw DimensionError("extract_gh: sample count differs from the grid");

  std::vector<std::vector<double>> w(grid.size());
  std::vector<double> h(grid.size());
  std::vector<Mat> metric(grid.size()), shape(grid.size());
  std::vector<std::vector<double>> z(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto u = grid.node(k);
    const geometry::PointFrame fr = geometry::frame_at(chart, u, 2);
    const auto split = geometry::decompose_ambient(fr, samples.values[k]);
    z[k] = split.tangent;
    h[k] = split.normal;
    w[k] = fr.g * split.tangent;
    metric[k] = fr.g;
    shape[k] = fr.A;
  }

  const auto forward = default_order(n);
  std::vector<int> backward(forward.rbegin(), forward.rend());
  const auto g = integrate_on_grid(grid, w, forward);
  const auto g_alt = integrate_on_grid(grid, w, backward);
  Extraction out;
  for (std::size_t k = 0; k < grid.size(); ++k)
    out.closedness_residual = std::max(out.closedness_residual, std::abs(g[k] - g_alt[k]));
  if (!(out.closedness_residual < options.closedness_tol))
    throw ConstraintError(fmt::format("tangential part of F is not a closed form: loop residual {:.3e}",
                                      out.closedness_residual));

  // The constraint A Z = -grad h is checked in integrated form: h - h(base)
  // against the line integral of -b(Z, .), which needs no differentiation of
  // the samples.
  std::vector<std::vector<double>> bz(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    bz[k] = metric[k] * (shape[k] * z[k]);
    for (double& c : bz[k]) c = -c;
  }
  const auto h_path = integrate_on_grid(grid, bz, forward);
  for (std::size_t k = 0; k < grid.size(); ++k)
    out.constraint_residual = std::max(out.constraint_residual, std::abs(h[k] - h[0] - h_path[k]));
  if (!(out.constraint_residual < options.constraint_tol))
    throw ConstraintError(fmt::format("recovered pair violates A(grad g) = -grad h: residual {:.3e}",
                                      out.constraint_residual));

  out.pair.provenance = Provenance::Extracted;
  out.pair.samples = SampledPair{grid, g, h};
  return out;
}

SampledPair sample_pair(const Chart& chart, const SampleGrid& grid, const GHPairData& pair) {
  if (pair.samples) {
    if (!same_grid(pair.samples->grid, grid)) throw DimensionError("sampled (g, h) pair lives on a different grid");
    return *pair.samples;
  }
  const auto& fields = require_fields(pair);
  SampledPair out{grid, {}, {}};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto u = grid.node(k);
    const ImmersionJets im = geometry::chart_jets(chart, u, 2);
    out.g.push_back(fields.g.value(im, u));
    out.h.push_back(fields.h.value(im, u));
  }
  return out;
}

GaugeFit gh_uniqueness_fit(const GHPairData& pair1, const GHPairData& pair2, const Chart& chart,
                           const SampleGrid& grid) {
  const int m = chart.ambient_dim() + 1;
  const auto p1 = sample_pair(chart, grid, pair1);
  const auto p2 = sample_pair(chart, grid, pair2);
  Mat normal(m, m);
  std::vector<double> rhs(m, 0.0);
  struct Row {
    std::vector<double> coeff;
    double value;
  };
  std::vector<Row> rows;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto u = grid.node(k);
    const geometry::PointFrame fr = geometry::frame_at(chart, u, 2);
    Row rg{fr.f, p2.g[k] - p1.g[k]};
    rg.coeff.push_back(1.0);
    Row rh{fr.N, p2.h[k] - p1.h[k]};
    rh.coeff.push_back(0.0);
    rows.push_back(std::move(rg));
    rows.push_back(std::move(rh));
  }
  for (const auto& r : rows)
    for (int i = 0; i < m; ++i) {
      rhs[i] += r.coeff[i] * r.value;
      for (int j = 0; j < m; ++j) normal(i, j) += r.coeff[i] * r.coeff[j];
    }
  const auto svd = linalg::svd_rank_kernel(normal, 0.0);
  GaugeFit out;
  const double smin = svd.singular_values.back();
  out.condition = smin > 0 ? svd.singular_values.front() / smin : INFINITY;
  if (!(out.condition < 1e14))
    throw NumericalError(fmt::format("gauge fit normal equations are singular (condition number {:.3e})",
                                     out.condition));
  const auto x = linalg::solve(normal, rhs);
  out.a.assign(x.begin(), x.end() - 1);
  out.c = x.back();
  for (const auto& r : rows) out.residual = std::max(out.residual, std::abs(linalg::dot(r.coeff, x) - r.value));
  return out;
}

}  // namespace isodeform::deformation
