#include "isodeform/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::suites {

using report::Accumulator;
using report::Check;

namespace {

std::string point_text(std::span<const double> u) {
  std::string s;
  for (std::size_t i = 0; i < u.size(); ++i) s += fmt::format("{}{:.6g}", i ? "," : "", u[i]);
  return s;
}

// Where the run currently is, for error messages.
struct Context {
  std::string check;
  std::vector<double> point;

  std::string describe() const {
    if (check.empty()) return "";
    if (point.empty()) return fmt::format("check {}: ", check);
    return fmt::format("check {} at u = ({}): ", check, point_text(point));
  }
};

class Runner {
 public:
  Runner(const scene::Scene& scene, const RunOptions& options, report::Report& rep)
      : scene_(scene), chart_(scene.chart), rep_(rep) {
    tol_ = scene::default_tolerances();
    for (const auto& [k, v] : scene.tolerances) tol_[k] = v;
    for (const auto& [k, v] : options.tolerances) {
      if (!tol_.count(k)) throw Error(fmt::format("unknown tolerance '{}'", k));
      if (!(v > 0)) throw Error(fmt::format("tolerance '{}' must be positive", k));
      tol_[k] = v;
    }
    grid_count_ = options.grid.value_or(scene.grid);
    if (grid_count_ < 3) throw Error("grid must be at least 3 per axis");
    grid_ = SampleGrid::interior(chart_.domain, grid_count_);
    if (options.point) {
      if (static_cast<int>(options.point->size()) != chart_.n)
        throw DimensionError(fmt::format("--point needs {} coordinates", chart_.n));
      if (!chart_.domain.contains(*options.point)) throw DimensionError("--point lies outside the chart domain");
      points_ = {*options.point};
      single_point_ = true;
    } else {
      for (std::size_t k = 0; k < grid_.size(); ++k) points_.push_back(grid_.node(k));
    }
  }

  void run() {
    for (scene::Suite s : scene_.suites) {
      switch (s) {
        case scene::Suite::Geometry: geometry_suite(); break;
        case scene::Suite::Codazzi: codazzi_suite(); break;
        case scene::Suite::Deformation: deformation_suite(); break;
        case scene::Suite::Roundtrip: roundtrip_suite(); break;
      }
    }
    ctx.check.clear();
  }

  Context ctx;

 private:
  Accumulator acc(const std::string& name, const char* suite) { return Accumulator(name, suite, tol_.at(name)); }

  void at(const std::string& check, const std::vector<double>& u) {
    ctx.check = check;
    ctx.point = u;
  }

  void push(const Accumulator& a, std::string note = {}) { rep_.checks.push_back(a.finish(std::move(note))); }

  // Rank statistics of A over the evaluation points.
  std::pair<int, int> rank_range(std::vector<double>* worst) {
    int lo = 1 << 20, hi = -1;
    for (const auto& u : points_) {
      at("rank_A", u);
      const int r = geometry::rank_A(geometry::frame_at(chart_, u, 2), tol_.at("rank"));
      if (r < lo && worst) *worst = u;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    rep_.rank_min = lo;
    rep_.rank_max = hi;
    return {lo, hi};
  }

  void geometry_suite() {
    const char* s = "geometry";
    auto w = acc("weingarten", s), g = acc("gauss", s), c = acc("codazzi_A", s), m = acc("metric_compatibility", s),
         b = acc("bianchi", s), sa = acc("A_self_adjoint", s), fd = acc("jet_vs_fd", s);
    for (const auto& u : points_) {
      at("geometry", u);
      const auto fr = geometry::frame_at(chart_, u, scene_.order);
      w.add(geometry::weingarten_residual(fr), u);
      g.add(geometry::gauss_residual(fr), u);
      c.add(geometry::codazzi_residual_A(fr), u);
      m.add(geometry::metric_compatibility_residual(fr), u);
      b.add(geometry::bianchi_residual(fr), u);
      sa.add(geometry::self_adjoint_residual(fr.g, fr.A), u);
      at("jet_vs_fd", u);
      const auto ref = geometry::fd_oracle(chart_, u);
      double scale_j = 1, diff_j = 0, scale_h = 1, diff_h = 0;
      for (int a = 0; a <= chart_.n; ++a)
        for (int i = 0; i < chart_.n; ++i) {
          scale_j = std::max(scale_j, std::abs(ref.J(a, i)));
          diff_j = std::max(diff_j, std::abs(ref.J(a, i) - fr.J(a, i)));
          for (int j = 0; j < chart_.n; ++j) {
            scale_h = std::max(scale_h, std::abs(ref.d2f(a, i, j)));
            diff_h = std::max(diff_h, std::abs(ref.d2f(a, i, j) - fr.d2f(a, i, j)));
          }
        }
      fd.add(std::max(diff_j / scale_j, diff_h / scale_h), u);
    }
    for (auto* a : {&w, &g, &c, &m, &b, &sa, &fd}) push(*a);
    rank_range(nullptr);
  }

  void codazzi_suite() {
    const char* s = "codazzi";
    const bool gh = std::holds_alternative<codazzi::GHPair>(scene_.spec);
    auto con = acc("gh_constraint", s), sa = acc("Q_self_adjoint", s), cq = acc("codazzi_Q", s),
         cm = acc("commutator", s), dc = acc("deformed_connection", s), dk = acc("deformed_curvature", s);
    // a violated gradient relation is recorded as a failing check rather
    // than aborting the suite
    codazzi::EvalOptions opts;
    if (gh) opts.constraint_tol = INFINITY;
    for (const auto& u : points_) {
      at("codazzi", u);
      const auto cf = codazzi::eval_codazzi(chart_, u, scene_.spec, 3, opts);
      const auto fr = geometry::frame_at(chart_, u, 2);
      if (gh) con.add(cf.constraint_residual, u);
      sa.add(geometry::self_adjoint_residual(fr.g, cf.Q), u);
      double worst = 0;
      std::vector<double> diff(chart_.n);
      for (int i = 0; i < chart_.n; ++i)
        for (int j = i + 1; j < chart_.n; ++j) {
          for (int k = 0; k < chart_.n; ++k) diff[k] = cf.nablaQ(i, k, j) - cf.nablaQ(j, k, i);
          worst = std::max(worst, geometry::g_norm(fr.g, diff));
        }
      cq.add(worst, u);
      cm.add(codazzi::commutator_residual(fr, cf.Q), u);
      at("deformed_metric", u);
      codazzi::deformed_metric(fr, cf.Q);
      at("deformed_connection", u);
      dc.add(codazzi::deformed_connection_residual(chart_, u, scene_.spec, opts), u);
      at("deformed_curvature", u);
      dk.add(codazzi::deformed_curvature_residual(chart_, u, scene_.spec, opts), u);
    }
    if (gh) push(con);
    for (auto* a : {&sa, &cq, &cm, &dc, &dk}) push(*a);
  }

  void rank_gate() {
    std::vector<double> worst;
    const auto [lo, hi] = rank_range(&worst);
    const int need = std::min(3, chart_.n);
    if (lo < need) {
      at("rank_A", worst);
      throw HypothesisError(
          fmt::format("rank A >= 3 violated: rank A = {}{}", lo,
                      chart_.n < 3 ? fmt::format(" (n = {} needs rank {})", chart_.n, need) : ""));
    }
    if (chart_.n < 3 && std::find(rep_.warnings.begin(), rep_.warnings.end(), kRankWarning) == rep_.warnings.end())
      rep_.warnings.push_back(kRankWarning);
  }

  linalg::Mat spec_q(std::span<const double> u) const {
    return jetmat::values(codazzi::codazzi_jets(geometry::chart_jets(chart_, u, 3), u, scene_.spec));
  }

  void deformation_suite() {
    const char* s = "deformation";
    rank_gate();
    if (scene_.pair && scene_.pair->fields) {
      closed_form_checks();
    } else {
      // no closed form: differentiate the path-integrated F at a coarse subgrid
      auto pm = acc("path_metric_realization", s), pd = acc("path_differential", s);
      const SampleGrid coarse = SampleGrid::interior(chart_.domain, 3);
      const auto base = grid_.box().lo;
      std::vector<std::vector<double>> pts;
      if (single_point_)
        pts = points_;
      else
        for (std::size_t k = 0; k < coarse.size(); ++k) pts.push_back(coarse.node(k));
      for (const auto& u : pts) {
        at("path_metric_realization", u);
        const auto r = deformation::path_realization_check(chart_, scene_.spec, base, u);
        pm.add(r.metric_residual, u);
        pd.add(r.differential_residual, u);
      }
      push(pm);
      push(pd);
    }
    if (single_point_) {
      note_skip("path integration checks");
      return;
    }
    loop_checks();
  }

  void closed_form_checks() {
    const char* s = "deformation";
    const auto& pair = *scene_.pair;
    auto pq = acc("pair_matches_spec", s), idem = acc("closed_form_idempotence", s), mr = acc("metric_realization", s),
         dr = acc("differential", s), sh = acc("shape_operator", s), sa = acc("A_tilde_self_adjoint", s),
         cz = acc("A_tilde_codazzi", s), wd = acc("wedge", s), ka = acc("kernel_angle", s), gm = acc("gauss_map", s);
    std::set<int> signs;
    std::string kernel_note;
    for (const auto& u : points_) {
      at("deformed_frame", u);
      const auto df = deformation::deformed_frame(chart_, u, pair);
      const linalg::Mat q = spec_q(u);
      pq.add((df.codazzi.Q - q).max_abs(), u);
      at("closed_form_idempotence", u);
      const auto again = deformation::closed_form_F(chart_, u, pair);
      double d = 0;
      for (std::size_t a = 0; a < again.size(); ++a) d = std::max(d, std::abs(again[a] - df.F[a]));
      idem.add(d, u);
      mr.add((df.metric - df.base.g * (q * q)).max_abs(), u);
      dr.add((df.dF - df.base.J * q).max_abs(), u);
      const auto cmp = deformation::deformed_shape_operator(df);
      signs.insert(cmp.sign);
      sh.add(cmp.residual, u);
      sa.add(cmp.self_adjoint_residual, u);
      cz.add(deformation::shape_codazzi_residual(df), u);
      wd.add(deformation::wedge_identity_residual(df.base, q, cmp.A_tilde, cmp.sign), u);
      try {
        ka.add(deformation::kernel_match_residual(df.base, cmp.A_tilde), u);
      } catch (const ConstraintError& e) {
        ka.add(INFINITY, u);
        if (kernel_note.empty()) kernel_note = e.what();
      }
      gm.add(deformation::gauss_map_congruence(df), u);
    }
    for (auto* a : {&pq, &idem, &mr, &dr, &sh, &sa, &cz, &wd}) push(*a);
    push(ka, kernel_note);
    push(gm);
    Check sc;
    sc.name = "sign_constancy";
    sc.suite = s;
    sc.tolerance = tol_.at("sign_constancy");
    sc.samples = points_.size();
    sc.max_residual = sc.mean_residual = static_cast<double>(signs.size()) - 1.0;
    sc.pass = signs.size() == 1 && sc.max_residual <= sc.tolerance;
    sc.note = signs.size() == 1 ? fmt::format("sign {:+d} at every point", *signs.begin()) : "sign changes";
    rep_.checks.push_back(sc);
    if (signs.size() == 1) rep_.sign = *signs.begin();
  }

  void loop_checks() {
    const char* s = "deformation";
    auto lp = acc("omega_loop", s);
    const Box& box = grid_.box();
    for (int a = 0; a < chart_.n; ++a)
      for (int b = a + 1; b < chart_.n; ++b) {
        deformation::LoopRect rect{box.lo, a, b, box.hi[a], box.hi[b]};
        at("omega_loop", box.lo);
        lp.add(deformation::omega_loop_residual(chart_, scene_.spec, rect), box.lo);
      }
    push(lp, "rectangles spanning the grid box in each coordinate plane");
    if (!scene_.pair || !scene_.pair->fields) return;

    const int count = path_grid_count(chart_.n, grid_count_);
    const SampleGrid pg = SampleGrid::interior(chart_.domain, count);
    ctx.check = "path_vs_closed";
    ctx.point.clear();
    const auto closed = deformation::sample_closed_form(chart_, pg, *scene_.pair);
    const auto path = deformation::sample_path_integral(chart_, scene_.spec, pg);
    std::vector<int> reversed(chart_.n);
    for (int i = 0; i < chart_.n; ++i) reversed[i] = chart_.n - 1 - i;
    ctx.check = "path_order_swap";
    const auto swapped = deformation::sample_path_integral(chart_, scene_.spec, pg, reversed);

    // spread of (path - closed) per ambient component, attributed to the
    // point farthest from the base value
    Accumulator spread = acc("path_vs_closed", s), swap = acc("path_order_swap", s);
    const int dim = chart_.ambient_dim();
    std::vector<double> offset(dim);
    for (int a = 0; a < dim; ++a) offset[a] = path.values[0][a] - closed.values[0][a];
    for (std::size_t k = 0; k < pg.size(); ++k) {
      double d = 0, e = 0;
      for (int a = 0; a < dim; ++a) {
        d = std::max(d, std::abs(path.values[k][a] - closed.values[k][a] - offset[a]));
        e = std::max(e, std::abs(path.values[k][a] - swapped.values[k][a]));
      }
      const auto u = pg.node(k);
      spread.add(d, u);
      swap.add(e, u);
    }
    push(spread, fmt::format("{} points per axis", count));
    push(swap, fmt::format("{} points per axis", count));
  }

  void roundtrip_suite() {
    const char* s = "roundtrip";
    if (!scene_.pair || !scene_.pair->fields) {
      rep_.warnings.push_back("roundtrip suite needs a (g, h) pair with a closed form; skipped");
      return;
    }
    if (single_point_) {
      note_skip("roundtrip suite");
      return;
    }
    if (grid_count_ < 9) {
      rep_.warnings.push_back("roundtrip suite needs at least 9 points per axis; skipped");
      return;
    }
    const auto& pair = *scene_.pair;
    ctx.check = "extract_gh";
    ctx.point.clear();
    const auto samples = deformation::sample_closed_form(chart_, grid_, pair);
    deformation::ExtractOptions lenient;
    lenient.closedness_tol = lenient.constraint_tol = INFINITY;
    const auto ex = deformation::extract_gh(chart_, samples, lenient);
    const auto base = grid_.box().lo;
    auto closed = acc("extract_closedness", s), con = acc("extract_constraint", s), fit = acc("gauge_fit", s),
         shift = acc("gauge_shift", s);
    closed.add(ex.closedness_residual, base);
    con.add(ex.constraint_residual, base);
    ctx.check = "gauge_fit";
    const auto f = deformation::gh_uniqueness_fit(pair, ex.pair, chart_, grid_);
    fit.add(f.residual, base);

    // synthetic gauge shift with known (a0, c0)
    ctx.check = "gauge_shift";
    const std::vector<double> pattern{0.3, -0.1, 0.2, 0.5, -0.4};
    std::vector<double> a0(chart_.ambient_dim());
    for (std::size_t i = 0; i < a0.size(); ++i) a0[i] = pattern[i % pattern.size()];
    const double c0 = 1.7;
    const auto sampled = deformation::sample_pair(chart_, grid_, pair);
    deformation::SampledPair shifted = sampled;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const auto fr = geometry::frame_at(chart_, grid_.node(k), 2);
      shifted.g[k] += linalg::dot(fr.f, a0) + c0;
      shifted.h[k] += linalg::dot(fr.N, a0);
    }
    deformation::GHPairData pair2;
    pair2.provenance = deformation::Provenance::UserSupplied;
    pair2.samples = shifted;
    const auto g2 = deformation::gh_uniqueness_fit(pair, pair2, chart_, grid_);
    double err = std::abs(g2.c - c0);
    for (std::size_t i = 0; i < a0.size(); ++i) err = std::max(err, std::abs(g2.a[i] - a0[i]));
    shift.add(err, base);
    push(closed);
    push(con);
    push(fit, fmt::format("a = ({}), c = {}", point_text(f.a), report::sci(f.c)));
    push(shift, fmt::format("condition number {}", report::sci(g2.condition)));
  }

  void note_skip(const std::string& what) {
    rep_.warnings.push_back(fmt::format("{} skipped in single-point mode", what));
  }

  static constexpr const char* kRankWarning = "rank A < 3 (n = 2): rigidity hypotheses do not apply";

  const scene::Scene& scene_;
  const geometry::Chart& chart_;
  report::Report& rep_;
  std::map<std::string, double> tol_;
  int grid_count_ = 9;
  SampleGrid grid_;
  std::vector<std::vector<double>> points_;
  bool single_point_ = false;
};

}  // namespace

int path_grid_count(int n, int grid) { return n <= 3 ? grid : std::min(grid, 5); }

report::Report run_suites(const scene::Scene& scene, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  report::Report rep;
  rep.chart = scene.chart.label;
  rep.spec = scene.variant.empty() ? "none" : codazzi::describe(scene.spec);
  rep.grid = options.grid.value_or(scene.grid);
  rep.order = scene.order;
  rep.warnings = scene.warnings;
  Context where;
  try {
    Runner runner(scene, options, rep);
    try {
      runner.run();
    } catch (...) {
      where = runner.ctx;
      throw;
    }
    rep.exit_code = rep.all_pass() ? kPass : kVerificationFailure;
  } catch (const HypothesisError& e) {
    rep.error = where.describe() + e.what();
    rep.exit_code = kHypothesisViolation;
  } catch (const ConstraintError& e) {
    rep.error = where.describe() + e.what();
    rep.exit_code = kVerificationFailure;
  } catch (const Error& e) {
    rep.error = where.describe() + e.what();
    rep.exit_code = kOtherError;
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace isodeform::suites
