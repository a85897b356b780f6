#include "isodeform/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "isodeform/catalog.hpp"
#include "isodeform/deformation.hpp"
#include "isodeform/error.hpp"
#include "isodeform/scene.hpp"
#include "isodeform/suites.hpp"

namespace isodeform::acceptance {

using deformation::GHPairData;
using geometry::Chart;
using linalg::Mat;

namespace {

constexpr const char* kGraphPhi = "u1^2 + 2*u2^2 + 3*u3^2";
constexpr int kGrid = 9;

std::string sci(double x) { return fmt::format("{:.2e}", x); }

double max_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<std::vector<double>> grid_points(const Chart& chart, int count) {
  const SampleGrid grid = SampleGrid::interior(chart.domain, count);
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < grid.size(); ++k) out.push_back(grid.node(k));
  return out;
}

// Gauss-map residuals gathered from every deformation run, for criterion 8.
struct Shared {
  std::vector<std::pair<std::string, double>> gauss_map;
};

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome structure_equations(Shared&) {
  const std::vector<Chart> charts{catalog::sphere3(2), catalog::ellipsoid3(2, 1.5, 1, 1), catalog::graph3(kGraphPhi)};
  bool pass = true;
  std::string detail;
  for (const auto& chart : charts) {
    double g = 0, c = 0, w = 0;
    for (const auto& u : grid_points(chart, kGrid)) {
      const auto fr = geometry::frame_at(chart, u, 3);
      g = std::max(g, geometry::gauss_residual(fr));
      c = std::max(c, geometry::codazzi_residual_A(fr));
      w = std::max(w, geometry::weingarten_residual(fr));
    }
    pass = pass && g < 1e-8 && c < 1e-8 && w < 1e-8;
    detail += fmt::format("{}{}: gauss {} codazzi {} weingarten {}", detail.empty() ? "" : "; ", chart.label, sci(g),
                          sci(c), sci(w));
  }
  return {pass, detail};
}

Outcome parallel_sphere(Shared& shared) {
  const Chart chart = catalog::sphere3(2);
  const GHPairData pair = deformation::gh_from_example5(chart, 1.0);
  double f_err = 0, metric_err = 0, shape_err = 0, gm = 0;
  std::set<int> signs;
  const Mat target = (-1.0 / 3.0) * Mat::identity(3);
  for (const auto& u : grid_points(chart, kGrid)) {
    const auto df = deformation::deformed_frame(chart, u, pair);
    std::vector<double> scaled(df.base.f);
    for (double& x : scaled) x *= 1.5;
    f_err = std::max(f_err, max_diff(df.F, scaled));
    metric_err = std::max(metric_err, (df.metric - 2.25 * df.base.g).max_abs());
    shape_err = std::max(shape_err, (df.shape - target).max_abs());
    signs.insert(deformation::deformed_shape_operator(df).sign);
    gm = std::max(gm, deformation::gauss_map_congruence(df));
  }
  shared.gauss_map.emplace_back("sphere3 parallel 1", gm);
  const bool pass = f_err < 1e-10 && metric_err < 1e-10 && shape_err < 1e-9 && signs.size() == 1;
  return {pass, fmt::format("|F-1.5f| {} |g~-2.25g| {} |A~+Id/3| {} sign {}", sci(f_err), sci(metric_err),
                            sci(shape_err), signs.size() == 1 ? fmt::format("{:+d}", *signs.begin()) : "varies")};
}

Outcome translate_graph(Shared& shared) {
  const Chart chart = catalog::graph3(kGraphPhi);
  const std::vector<double> a{0.3, -0.1, 0.2, 0.5};
  const GHPairData pair = deformation::gh_from_example6(chart, a);
  double f_err = 0, metric_err = 0, gm = 0;
  for (const auto& u : grid_points(chart, kGrid)) {
    const auto df = deformation::deformed_frame(chart, u, pair);
    std::vector<double> expected(a);
    for (std::size_t k = 0; k < a.size(); ++k) expected[k] += df.base.N[k];
    f_err = std::max(f_err, max_diff(df.F, expected));
    metric_err = std::max(metric_err, (df.metric - df.base.g * (df.base.A * df.base.A)).max_abs());
    gm = std::max(gm, deformation::gauss_map_congruence(df));
  }
  shared.gauss_map.emplace_back("graph3 translate", gm);
  return {f_err < 1e-10 && metric_err < 1e-9,
          fmt::format("|F-(a+N)| {} |g~-gA^2| {}", sci(f_err), sci(metric_err))};
}

Outcome metric_realization(Shared& shared) {
  const Chart chart = catalog::graph3(kGraphPhi);
  const double t = 0.05;
  const GHPairData pair = deformation::gh_from_example5(chart, t);
  double metric_err = 0, diff_err = 0, gm = 0;
  for (const auto& u : grid_points(chart, kGrid)) {
    const auto df = deformation::deformed_frame(chart, u, pair, 4);
    const Mat q = Mat::identity(3) - t * df.base.A;
    metric_err = std::max(metric_err, (df.metric - df.base.g * (q * q)).max_abs());
    diff_err = std::max(diff_err, (df.dF - df.base.J * q).max_abs());
    gm = std::max(gm, deformation::gauss_map_congruence(df));
  }
  shared.gauss_map.emplace_back("graph3 parallel 0.05", gm);
  return {metric_err < 1e-9 && diff_err < 1e-9,
          fmt::format("|<dF,dF>-gQ^2| {} |dF-JQ| {}", sci(metric_err), sci(diff_err))};
}

Outcome connection_curvature(Shared&) {
  const Chart chart = catalog::graph3(kGraphPhi);
  const codazzi::CodazziSpec spec = codazzi::Parallel{0.05};
  double conn = 0, curv = 0;
  for (const auto& u : grid_points(chart, kGrid)) {
    conn = std::max(conn, codazzi::deformed_connection_residual(chart, u, spec));
    curv = std::max(curv, codazzi::deformed_curvature_residual(chart, u, spec));
  }
  return {conn < 1e-7 && curv < 1e-6, fmt::format("connection {} curvature {}", sci(conn), sci(curv))};
}

Outcome integration(Shared&) {
  double loop = 0;
  const std::vector<std::pair<Chart, double>> runs{{catalog::graph3(kGraphPhi), 0.05}, {catalog::sphere3(2), 1.0}};
  for (const auto& [chart, t] : runs) {
    const Box box = SampleGrid::interior(chart.domain, kGrid).box();
    for (int a = 0; a < chart.n; ++a)
      for (int b = a + 1; b < chart.n; ++b)
        loop = std::max(loop, deformation::omega_loop_residual(chart, codazzi::Parallel{t},
                                                               {box.lo, a, b, box.hi[a], box.hi[b]}));
  }
  const Chart chart = catalog::graph3(kGraphPhi);
  const SampleGrid grid = SampleGrid::interior(chart.domain, kGrid);
  const codazzi::CodazziSpec spec = codazzi::Parallel{0.05};
  const auto closed = deformation::sample_closed_form(chart, grid, deformation::gh_from_example5(chart, 0.05));
  const auto path = deformation::sample_path_integral(chart, spec, grid);
  const int reversed[] = {2, 1, 0};
  const auto swapped = deformation::sample_path_integral(chart, spec, grid, reversed);
  double spread = 0, swap = 0;
  for (int a = 0; a <= chart.n; ++a) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double d = path.values[k][a] - closed.values[k][a];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      swap = std::max(swap, std::abs(path.values[k][a] - swapped.values[k][a]));
    }
    spread = std::max(spread, hi - lo);
  }
  return {loop < 1e-9 && spread < 1e-7 && swap < 1e-8,
          fmt::format("loops {} path-closed spread {} order swap {}", sci(loop), sci(spread), sci(swap))};
}

Outcome wedge_kernel(Shared& shared) {
  const Chart chart = catalog::sphcyl4(1);
  const GHPairData pair = deformation::gh_from_example5(chart, 0.3);
  double wedge = 0, angle = 0, gm = 0;
  int rank_min = 99, rank_max = -1;
  std::string failure;
  for (const auto& u : grid_points(chart, kGrid)) {
    const auto df = deformation::deformed_frame(chart, u, pair);
    const auto cmp = deformation::deformed_shape_operator(df);
    wedge = std::max(wedge, deformation::wedge_identity_residual(df.base, df.codazzi.Q, cmp.A_tilde, cmp.sign));
    try {
      angle = std::max(angle, deformation::kernel_match_residual(df.base, cmp.A_tilde));
    } catch (const ConstraintError& e) {
      angle = INFINITY;
      if (failure.empty()) failure = e.what();
    }
    const int r = geometry::rank_A(df.base);
    rank_min = std::min(rank_min, r);
    rank_max = std::max(rank_max, r);
    gm = std::max(gm, deformation::gauss_map_congruence(df));
  }
  shared.gauss_map.emplace_back("sphcyl4 parallel 0.3", gm);
  std::string detail = fmt::format("wedge {} kernel angle {} rank A {}..{}", sci(wedge), sci(angle), rank_min, rank_max);
  if (!failure.empty()) detail += "; " + failure;
  return {wedge < 1e-9 && angle < 1e-6 && rank_min == 3 && rank_max == 3, detail};
}

Outcome gauss_maps(Shared& shared) {
  if (shared.gauss_map.size() < 4) return {false, "earlier deformation runs did not complete"};
  bool pass = true;
  std::string detail;
  for (const auto& [name, r] : shared.gauss_map) {
    pass = pass && r < 1e-9;
    detail += fmt::format("{}{} {}", detail.empty() ? "" : "; ", name, sci(r));
  }
  return {pass, detail};
}

Outcome roundtrip(Shared&) {
  const Chart chart = catalog::ellipsoid3(2, 1.5, 1, 1);
  const SampleGrid grid = SampleGrid::interior(chart.domain, kGrid);
  const GHPairData pair = deformation::gh_from_example5(chart, 0.1);
  const auto ex = deformation::extract_gh(chart, deformation::sample_closed_form(chart, grid, pair));
  const auto fit = deformation::gh_uniqueness_fit(pair, ex.pair, chart, grid);

  const std::vector<double> a0{0.3, -0.1, 0.2, 0.5};
  const double c0 = 1.7;
  auto shifted = deformation::sample_pair(chart, grid, pair);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto fr = geometry::frame_at(chart, grid.node(k), 2);
    shifted.g[k] += linalg::dot(fr.f, a0) + c0;
    shifted.h[k] += linalg::dot(fr.N, a0);
  }
  GHPairData pair2;
  pair2.samples = shifted;
  const auto shift = deformation::gh_uniqueness_fit(pair, pair2, chart, grid);
  double shift_err = std::abs(shift.c - c0);
  for (std::size_t i = 0; i < a0.size(); ++i) shift_err = std::max(shift_err, std::abs(shift.a[i] - a0[i]));
  return {fit.residual < 1e-6 && shift_err < 1e-8,
          fmt::format("{}: closedness {} constraint {} fit residual {}; gauge shift error {}", chart.label,
                      sci(ex.closedness_residual), sci(ex.constraint_residual), sci(fit.residual), sci(shift_err))};
}

// Q = g^-1 S on the Monge graph of kGraphPhi, with S a constant symmetric
// matrix whose eigenvectors are rotated away from the principal directions.
std::string non_commuting_scene() {
  const double c = std::cos(0.5), s = std::sin(0.5);
  const double sm[3][3] = {{c * c + 2 * s * s, c * s, 0}, {c * s, s * s + 2 * c * c, 0}, {0, 0, 3}};
  const char* w[3] = {"(2*u1)", "(4*u2)", "(6*u3)"};
  const std::string denom = "(1 + (2*u1)^2 + (4*u2)^2 + (6*u3)^2)";
  std::string text = fmt::format("[chart]\ncatalog=graph3 phi=\"{}\"\n[codazzi]\nvariant=explicit\n", kGraphPhi);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) {
      std::string entry;
      for (int m = 0; m < 3; ++m) {
        if (sm[m][j] == 0) continue;
        const std::string ginv = fmt::format("{} - {}*{}/{}", k == m ? 1 : 0, w[k], w[m], denom);
        entry += fmt::format("{}({})*({})", entry.empty() ? "" : " + ", ginv, sm[m][j]);
      }
      text += fmt::format("q{}{}=\"{}\"\n", k + 1, j + 1, entry);
    }
  text += "[run]\ngrid=5 suites=codazzi,deformation\n";
  return text;
}

Outcome negative_controls(Shared&) {
  // (a) loop integral of the non-Codazzi Q = diag(1, 1 + u1) on the plane
  const Chart plane = catalog::plane2();
  codazzi::Explicit q;
  for (const char* e : {"1", "0", "0", "1 + u1"}) q.entries.push_back(expr::parse(e, 2));
  const auto loop = deformation::omega_loop_integrals(plane, q, {{0.0, 0.0}, 0, 1, 1.0, 1.0});
  const bool a_ok = std::abs(loop[1] + 1.0) < 1e-8 && std::abs(loop[0]) < 1e-8 && std::abs(loop[2]) < 1e-8;

  // (b) non-commuting explicit Q on the graph
  const auto rep_b = suites::run_suites(scene::parse_scene(non_commuting_scene()));
  const auto* comm = rep_b.find("commutator");
  const auto* real = rep_b.find("path_metric_realization");
  const bool b_ok = rep_b.exit_code == suites::kVerificationFailure && comm && real && !comm->pass && !real->pass &&
                    comm->max_residual > 1e-3 && real->max_residual > 1e-3;

  // (c) rank gate on the plane
  const auto rep_c = suites::run_suites(scene::parse_scene(
      "[chart]\ncatalog=plane2\n[codazzi]\nvariant=parallel t=0.5\n[run]\nsuites=deformation\n"));
  const bool c_ok = rep_c.exit_code == suites::kHypothesisViolation &&
                    rep_c.error.find("rank A >= 3 violated") != std::string::npos;

  return {a_ok && b_ok && c_ok,
          fmt::format("(a) loop = ({:.10f}, {:.10f}, {:.10f}) (b) exit {} commutator {} path metric {} (c) exit {}",
                      loop[0], loop[1], loop[2], rep_b.exit_code, comm ? sci(comm->max_residual) : "missing",
                      real ? sci(real->max_residual) : "missing", rep_c.exit_code)};
}

Outcome oracles(Shared&) {
  std::mt19937_64 rng(20261015);
  const std::vector<Chart> charts{catalog::sphere3(2),        catalog::ellipsoid3(2, 1.5, 1, 1),
                                  catalog::graph3(kGraphPhi), catalog::torus2(2, 1),
                                  catalog::sphcyl4(1),        catalog::plane2()};
  double worst = 0;
  for (int p = 0; p < 100; ++p) {
    const Chart& chart = charts[p % charts.size()];
    const Box box = chart.domain.shrunk(0.02);
    std::vector<double> u(chart.n);
    for (int i = 0; i < chart.n; ++i) u[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
    const auto fr = geometry::frame_at(chart, u, 2);
    const auto ref = geometry::fd_oracle(chart, u);
    double sj = 1, dj = 0, sh = 1, dh = 0;
    for (int a = 0; a <= chart.n; ++a)
      for (int i = 0; i < chart.n; ++i) {
        sj = std::max(sj, std::abs(ref.J(a, i)));
        dj = std::max(dj, std::abs(ref.J(a, i) - fr.J(a, i)));
        for (int j = 0; j < chart.n; ++j) {
          sh = std::max(sh, std::abs(ref.d2f(a, i, j)));
          dh = std::max(dh, std::abs(ref.d2f(a, i, j) - fr.d2f(a, i, j)));
        }
      }
    worst = std::max({worst, dj / sj, dh / sh});
  }
  int fixpoints = 0;
  for (int k = 0; k < 500; ++k) {
    const std::string text = random_expression(rng, 4, 3);
    const auto first = expr::parse(text, 3);
    const std::string printed = expr::print(first);
    const auto second = expr::parse(printed, 3);
    if (expr::print(second) == printed && expr::same_structure(first.root(), second.root())) ++fixpoints;
  }
  return {worst < 1e-5 && fixpoints == 500,
          fmt::format("jet vs FD relative error {} on 100 points; {} / 500 parser fixpoints", sci(worst), fixpoints)};
}

}  // namespace

std::string random_expression(std::mt19937_64& rng, int depth, int n_vars) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto space = [&] { return pick(3) == 0 ? std::string(" ") : std::string(); };
  static const char* numbers[] = {"0", "1", "2", "0.5", "3.25", "10", "1e-3", "2.5e2", "7"};
  static const char* funcs[] = {"sin", "cos", "exp", "log", "sqrt"};
  static const char* ops[] = {"+", "-", "*", "/", "^"};
  if (depth <= 0 || pick(4) == 0) {
    switch (pick(3)) {
      case 0: return numbers[pick(9)];
      case 1: return fmt::format("u{}", 1 + pick(n_vars));
      default: return "pi";
    }
  }
  switch (pick(4)) {
    case 0: return "-" + random_expression(rng, depth - 1, n_vars);
    case 1: return fmt::format("{}({}{}{})", funcs[pick(5)], space(), random_expression(rng, depth - 1, n_vars), space());
    case 2:
      return fmt::format("({}{}{}{}{})", random_expression(rng, depth - 1, n_vars), space(), ops[pick(5)], space(),
                         random_expression(rng, depth - 1, n_vars));
    default:
      return fmt::format("{}{}{}{}{}", random_expression(rng, depth - 1, n_vars), space(), ops[pick(5)], space(),
                         random_expression(rng, depth - 1, n_vars));
  }
}

std::string format_line(const CriterionResult& r) {
  return fmt::format("{}  {:>2}  {}: {} ({:.2f} s)", r.pass ? "PASS" : "FAIL", r.id, r.title, r.detail, r.seconds);
}

std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_result) {
  using Fn = Outcome (*)(Shared&);
  const std::vector<std::pair<const char*, Fn>> criteria{
      {"structure equations", structure_equations},
      {"parallel hypersurface of the sphere", parallel_sphere},
      {"Gauss map translate on the graph", translate_graph},
      {"metric realization, non-umbilic", metric_realization},
      {"deformed connection and curvature", connection_curvature},
      {"path integration of dF = df Q", integration},
      {"wedge identity and kernels", wedge_kernel},
      {"Gauss map congruence", gauss_maps},
      {"(g, h) recovery and gauge", roundtrip},
      {"negative controls", negative_controls},
      {"oracle agreement", oracles},
  };
  Shared shared;
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    CriterionResult r;
    r.id = static_cast<int>(i + 1);
    r.title = criteria[i].first;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = criteria[i].second(shared);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = fmt::format("error: {}", e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace isodeform::acceptance
