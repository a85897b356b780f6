#include <doctest.h>

#include <cmath>

#include "isodeform/catalog.hpp"
#include "isodeform/codazzi.hpp"
#include "isodeform/error.hpp"

#include <fmt/format.h>

using namespace isodeform;
using codazzi::CodazziSpec;
using geometry::Chart;
using linalg::Mat;

namespace {

const char* kPhi = "u1^2 + 2*u2^2 + 3*u3^2";

std::vector<std::vector<double>> grid_points(const Chart& chart, int count) {
  const auto grid = SampleGrid::interior(chart.domain, count);
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < grid.size(); ++k) out.push_back(grid.node(k));
  return out;
}

codazzi::Explicit explicit_q(const std::vector<std::string>& entries, int n) {
  codazzi::Explicit q;
  for (const auto& e : entries) q.entries.push_back(expr::parse(e, n));
  return q;
}

// g = <f, a>, h = <N, a> + 1 built directly from the immersion jets.
codazzi::GHPair translate_pair(const Chart& chart, const std::vector<double>& a) {
  std::string g;
  for (std::size_t k = 0; k < a.size(); ++k) g += fmt::format("{}({})*({})", k ? " + " : "", a[k], expr::print(chart.components[k]));
  auto h = geometry::ScalarField::derived("<N,a>+1", [a](const geometry::ImmersionJets& im, std::span<const double>) {
    auto s = im.normal[0] * a[0];
    for (std::size_t k = 1; k < a.size(); ++k) s += im.normal[k] * a[k];
    return s + 1.0;
  });
  return {geometry::ScalarField::expression(expr::parse(g, chart.n)), h};
}

// g = |f|^2 / 2, h = <f, N> + t.
codazzi::GHPair parallel_pair(const Chart& chart, double t) {
  std::string g;
  for (std::size_t k = 0; k < chart.components.size(); ++k)
    g += fmt::format("{}({})^2", k ? " + " : "", expr::print(chart.components[k]));
  auto h = geometry::ScalarField::derived("<f,N>+t", [t](const geometry::ImmersionJets& im, std::span<const double>) {
    auto s = jet::mul_common(im.f[0], im.normal[0]);
    for (std::size_t k = 1; k < im.f.size(); ++k) s = jet::add_common(s, jet::mul_common(im.f[k], im.normal[k]));
    return s + t;
  });
  return {geometry::ScalarField::expression(expr::parse(fmt::format("({}) / 2", g), chart.n)), h};
}

}  // namespace

TEST_CASE("Q per variant") {
  const auto sphere = catalog::sphere3(2);
  const std::vector<double> u{0.6, 0.8, 1.0};
  auto fr = codazzi::eval_codazzi(sphere, u, codazzi::Parallel{0.0});
  CHECK((fr.Q - Mat::identity(3)).max_abs() < 1e-15);
  fr = codazzi::eval_codazzi(sphere, u, codazzi::Parallel{1.0});
  CHECK((fr.Q - 1.5 * Mat::identity(3)).max_abs() < 1e-12);
  CHECK((fr.Q * fr.Q_inv - Mat::identity(3)).max_abs() < 1e-10);
  fr = codazzi::eval_codazzi(sphere, u, codazzi::MinusA{});
  CHECK((fr.Q - 0.5 * Mat::identity(3)).max_abs() < 1e-12);

  const std::vector<double> a{0.3, -0.1, 0.2, 0.5};
  for (const auto& chart : {catalog::graph3(kPhi), catalog::sphere3(2)}) {
    for (const auto& p : grid_points(chart, 3)) {
      const auto g = codazzi::eval_codazzi(chart, p, translate_pair(chart, a));
      const auto frame = geometry::frame_at(chart, p, 2);
      CHECK((g.Q + frame.A).max_abs() < 1e-9);
      CHECK(g.constraint_residual < 1e-9);
    }
  }

  const auto ex = codazzi::eval_codazzi(catalog::flat(3), std::vector<double>{0.5, 0, 0},
                                        explicit_q({"1", "0", "0", "0", "1 + u1", "0", "0", "0", "1"}, 3));
  CHECK(ex.Q(1, 1) == doctest::Approx(1.5));
}

TEST_CASE("Codazzi residual of Q") {
  for (const auto& chart : {catalog::sphere3(2), catalog::graph3(kPhi), catalog::torus2(2, 1)}) {
    for (const auto& p : grid_points(chart, 3)) CHECK(codazzi::codazzi_residual_Q(chart, p, codazzi::Parallel{0.2}) < 1e-8);
  }
  const auto graph = catalog::graph3(kPhi);
  for (const auto& p : grid_points(graph, 3)) CHECK(codazzi::codazzi_residual_Q(graph, p, parallel_pair(graph, 0.05)) < 1e-8);

  // d_1 Q e_2 = e_2 while d_2 Q e_1 = 0
  const auto flat = catalog::flat(3);
  const auto bad = explicit_q({"1", "0", "0", "0", "1 + u1", "0", "0", "0", "1"}, 3);
  CHECK(codazzi::codazzi_residual_Q(flat, std::vector<double>{0, 0, 0}, bad) == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("property: the Codazzi condition is linear") {
  const auto flat = catalog::flat(3);
  const std::vector<std::string> q1{"1", "0", "0", "0", "1 + u1", "0", "0", "0", "1"};
  const std::vector<std::string> q2{"2", "u3", "0", "u3", "2", "0", "0", "0", "2 + u2^2"};
  // same-sign combinations of the two positive definite fields stay nonsingular
  const std::pair<double, double> coeffs[] = {{0.5, 1.0}, {2.0, 0.25}, {-0.5, -1.0}, {-1.5, -0.25}};
  for (const auto& [alpha, beta] : coeffs) {
    std::vector<std::string> mix;
    for (int k = 0; k < 9; ++k) mix.push_back(fmt::format("({})*({}) + ({})*({})", alpha, q1[k], beta, q2[k]));
    for (const auto& p : grid_points(flat, 3)) {
      const double r1 = codazzi::codazzi_residual_Q(flat, p, explicit_q(q1, 3));
      const double r2 = codazzi::codazzi_residual_Q(flat, p, explicit_q(q2, 3));
      const double rm = codazzi::codazzi_residual_Q(flat, p, explicit_q(mix, 3));
      CHECK(rm <= std::abs(alpha) * r1 + std::abs(beta) * r2 + 1e-12);
    }
  }
}

TEST_CASE("commutator") {
  const auto sphere = geometry::frame_at(catalog::sphere3(2), std::vector<double>{0.7, 0.7, 0.7}, 2);
  const Mat any(3, 3, {1, 2, 3, -4, 5, 0.5, 7, 0, 9});
  CHECK(codazzi::commutator_residual(sphere, any) < 1e-12);

  const auto chart = catalog::graph3(kPhi);
  for (const auto& p : grid_points(chart, 3)) {
    const auto fr = geometry::frame_at(chart, p, 3);
    CHECK(codazzi::commutator_residual(fr, codazzi::eval_codazzi(chart, p, codazzi::Parallel{0.3}).Q) < 1e-11);
  }

  // g^-1 S with S symmetric and rotated against the principal directions
  const auto fr = geometry::frame_at(chart, std::vector<double>{0.2, -0.1, 0.3}, 2);
  const double c = std::cos(0.5), s = std::sin(0.5);
  const Mat rot(3, 3, {c, -s, 0, s, c, 0, 0, 0, 1});
  const std::vector<double> d{1, 2, 3};
  const Mat q = fr.g_inv * rot * Mat::diagonal(d) * rot.transposed();
  CHECK(geometry::self_adjoint_residual(fr.g, q) < 1e-12);
  CHECK(codazzi::commutator_residual(fr, q) > 0.1);
}

TEST_CASE("deformed metric") {
  const auto fr = geometry::frame_at(catalog::sphere3(2), std::vector<double>{0.7, 0.8, 0.9}, 2);
  CHECK((codazzi::deformed_metric(fr, Mat::identity(3)) - fr.g).max_abs() == 0.0);
  CHECK((codazzi::deformed_metric(fr, 1.5 * Mat::identity(3)) - 2.25 * fr.g).max_abs() < 1e-12);
  CHECK((codazzi::deformed_metric(fr, -1.0 * fr.A) - 0.25 * fr.g).max_abs() < 1e-12);
  const std::vector<double> d{1, 0, 1};
  CHECK_THROWS_AS(codazzi::deformed_metric(fr, Mat::diagonal(d)), ConstraintError);
}

TEST_CASE("property: deformed metric is bounded below") {
  const auto chart = catalog::graph3(kPhi);
  for (double t : {-0.05, 0.05, 0.1})
    for (const auto& p : grid_points(chart, 3)) {
      const auto fr = geometry::frame_at(chart, p, 2);
      const auto cf = codazzi::eval_codazzi(chart, p, codazzi::Parallel{t});
      const Mat gt = codazzi::deformed_metric(fr, cf.Q);
      const double sq = linalg::svd_rank_kernel(cf.Q).singular_values.back();
      const double sg = linalg::svd_rank_kernel(fr.g).singular_values.back();
      CHECK(linalg::svd_rank_kernel(gt).singular_values.back() >= sg * sq * sq * (1 - 1e-12));
    }
}

TEST_CASE("property: gradient-pair Q is self-adjoint") {
  const auto chart = catalog::graph3(kPhi);
  for (const auto& p : grid_points(chart, 3)) {
    const auto fr = geometry::frame_at(chart, p, 2);
    const auto cf = codazzi::eval_codazzi(chart, p, parallel_pair(chart, 0.1));
    CHECK(cf.constraint_residual < 1e-9);
    CHECK(geometry::self_adjoint_residual(fr.g, cf.Q) < 1e-9);
  }
}

TEST_CASE("deformed connection") {
  const std::vector<double> u{0.7, 0.8, 0.9};
  CHECK(codazzi::deformed_connection_residual(catalog::sphere3(2), u, codazzi::Parallel{0.0}) < 1e-12);
  CHECK(codazzi::deformed_connection_residual(catalog::sphere3(2), u, codazzi::Parallel{1.0}) < 1e-9);
  const auto chart = catalog::graph3(kPhi);
  for (const auto& p : grid_points(chart, 3))
    CHECK(codazzi::deformed_connection_residual(chart, p, parallel_pair(chart, 0.1)) < 1e-7);
}

TEST_CASE("deformed curvature") {
  const std::vector<double> u{0.7, 0.8, 0.9};
  CHECK(codazzi::deformed_curvature_residual(catalog::sphere3(2), u, codazzi::Parallel{0.0}) < 1e-12);
  CHECK(codazzi::deformed_curvature_residual(catalog::sphere3(2), u, codazzi::Parallel{1.0}) < 1e-8);
  const auto chart = catalog::graph3(kPhi);
  for (const auto& p : grid_points(chart, 3))
    CHECK(codazzi::deformed_curvature_residual(chart, p, codazzi::Parallel{0.05}) < 1e-6);
}

TEST_CASE("Q^-1 A is Codazzi for the deformed connection") {
  const auto chart = catalog::graph3(kPhi);
  for (const auto& p : grid_points(chart, 3))
    CHECK(codazzi::deformed_shape_codazzi_residual(chart, p, codazzi::Parallel{0.05}) < 1e-6);
}

TEST_CASE("hypothesis and constraint errors") {
  const auto sphere = catalog::sphere3(2);
  const std::vector<double> u{0.7, 0.8, 0.9};
  // A = -Id / 2, so Id - t A vanishes at t = -2
  CHECK_THROWS_AS(codazzi::eval_codazzi(sphere, u, codazzi::Parallel{-2.0}), HypothesisError);
  CHECK_THROWS_AS(codazzi::eval_codazzi(catalog::plane2(), std::vector<double>{0, 0}, codazzi::MinusA{}),
                  HypothesisError);

  const auto graph = catalog::graph3(kPhi);
  const codazzi::GHPair wrong{geometry::ScalarField::expression(expr::parse("u1", 3)),
                              geometry::ScalarField::expression(expr::parse("0", 3))};
  CHECK_THROWS_AS(codazzi::eval_codazzi(graph, std::vector<double>{0.1, 0.1, 0.1}, wrong), ConstraintError);

  const auto flat = catalog::flat(3);
  CHECK_THROWS_AS(codazzi::eval_codazzi(flat, std::vector<double>{0, 0, 0},
                                        explicit_q({"1", "1", "0", "0", "1", "0", "0", "0", "1"}, 3)),
                  ConstraintError);
  CHECK_THROWS_AS(codazzi::eval_codazzi(flat, std::vector<double>{0, 0, 0}, explicit_q({"1", "0", "0", "1"}, 3)),
                  DimensionError);
}
