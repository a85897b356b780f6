#include <doctest.h>

#include <cmath>
#include <random>

#include "isodeform/catalog.hpp"
#include "isodeform/error.hpp"
#include "isodeform/geometry.hpp"
#include "oracles.hpp"

using namespace isodeform;
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

std::vector<Chart> catalog_charts() {
  return {catalog::plane2(), catalog::flat(3), catalog::torus2(2, 1), catalog::sphere3(2),
          catalog::ellipsoid3(2, 1.5, 1, 1), catalog::graph3(kPhi), catalog::sphcyl4(1)};
}

}  // namespace

TEST_CASE("plane") {
  const auto fr = geometry::frame_at(catalog::plane2(), std::vector<double>{0.3, -0.2}, 3);
  CHECK((fr.g - Mat::identity(2)).max_abs() == 0.0);
  CHECK(fr.b.max_abs() == 0.0);
  CHECK(fr.A.max_abs() == 0.0);
  for (int l = 0; l < 2; ++l)
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i) {
        CHECK(fr.Gamma(l, k, i) == 0.0);
        for (int j = 0; j < 2; ++j) CHECK(fr.R(l, k, i, j) == 0.0);
      }
  CHECK(geometry::gauss_residual(fr) < 1e-14);
  CHECK(geometry::codazzi_residual_A(fr) == 0.0);
  CHECK(geometry::rank_A(fr) == 0);
}

TEST_CASE("round sphere against closed forms") {
  const auto chart = catalog::sphere3(2);
  for (const auto& u : grid_points(chart, 4)) {
    const auto fr = geometry::frame_at(chart, u, 3);
    const double s1 = std::sin(u[0]), s2 = std::sin(u[1]);
    const double gd[3] = {4, 4 * s1 * s1, 4 * s1 * s1 * s2 * s2};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(fr.g(i, j) == doctest::Approx(i == j ? gd[i] : 0.0).epsilon(1e-12));
        CHECK(fr.A(i, j) == doctest::Approx(i == j ? -0.5 : 0.0).epsilon(1e-12));
      }
    const auto f = oracle::sphere3(2, u);
    for (int a = 0; a < 4; ++a) {
      CHECK(fr.f[a] == doctest::Approx(f[a]).epsilon(1e-14));
      CHECK(fr.N[a] == doctest::Approx(f[a] / 2).epsilon(1e-12));
      for (int i = 0; i < 3; ++i) CHECK(std::abs(fr.dN(a, i) - fr.J(a, i) / 2) < 1e-10);
    }
    // constant curvature 1/4: R(e_i, e_j) e_k = (g_jk e_i - g_ik e_j) / 4
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            const double expected = ((l == i) * fr.g(j, k) - (l == j) * fr.g(i, k)) / 4;
            CHECK(std::abs(fr.R(l, k, i, j) - expected) < 1e-10);
          }
    CHECK(geometry::gauss_residual(fr) < 1e-9);
    CHECK(geometry::codazzi_residual_A(fr) < 1e-10);
    CHECK(geometry::rank_A(fr) == 3);
  }
}

TEST_CASE("Monge graph against closed forms") {
  const auto chart = catalog::graph3(kPhi);
  const auto at0 = geometry::frame_at(chart, std::vector<double>{0, 0, 0}, 3);
  CHECK((at0.g - Mat::identity(3)).max_abs() < 1e-15);
  const double hess[3] = {2, 4, 6};
  for (int i = 0; i < 3; ++i) CHECK(at0.A(i, i) == doctest::Approx(-hess[i]));

  // graph metric g = I + p p^T, Gamma^k_ij = p_k phi_ij / (1 + |p|^2)
  for (const auto& u : grid_points(chart, 4)) {
    const auto fr = geometry::frame_at(chart, u, 3);
    const auto p = oracle::paraboloid_gradient(u);
    const double w = 1 + p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    const auto n = oracle::graph_normal(p);
    for (int a = 0; a < 4; ++a) CHECK(fr.N[a] == doctest::Approx(n[a]).epsilon(1e-13));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(fr.g(i, j) == doctest::Approx((i == j) + p[i] * p[j]).epsilon(1e-13));
        for (int k = 0; k < 3; ++k) {
          const double expected = i == j ? p[k] * hess[i] / w : 0.0;
          CHECK(std::abs(fr.Gamma(k, i, j) - expected) < 1e-13);
        }
      }
  }
}

TEST_CASE("structure equations on grids") {
  for (const auto& chart : {catalog::sphere3(2), catalog::ellipsoid3(2, 1.5, 1, 1), catalog::graph3(kPhi)}) {
    CAPTURE(chart.label);
    double gauss = 0, cod = 0, wein = 0;
    for (const auto& u : grid_points(chart, 9)) {
      const auto fr = geometry::frame_at(chart, u, 3);
      gauss = std::max(gauss, geometry::gauss_residual(fr));
      cod = std::max(cod, geometry::codazzi_residual_A(fr));
      wein = std::max(wein, geometry::weingarten_residual(fr));
    }
    CHECK(gauss < 1e-8);
    CHECK(cod < 1e-8);
    CHECK(wein < 1e-10);
  }
}

TEST_CASE("property: frame invariants on every catalog chart") {
  for (const auto& chart : catalog_charts()) {
    CAPTURE(chart.label);
    for (const auto& u : grid_points(chart, chart.n == 4 ? 3 : 5)) {
      const auto fr = geometry::frame_at(chart, u, 3);
      CHECK(geometry::weingarten_residual(fr) < 1e-9);
      CHECK(geometry::metric_compatibility_residual(fr) < 1e-11);
      CHECK(geometry::bianchi_residual(fr) < 1e-10);
      CHECK(geometry::self_adjoint_residual(fr.g, fr.A) < 1e-11);
      CHECK((fr.b - fr.b.transposed()).max_abs() < 1e-12);
      for (int k = 0; k < chart.n; ++k)
        for (int i = 0; i < chart.n; ++i)
          for (int j = 0; j < chart.n; ++j) CHECK(fr.Gamma(k, i, j) == fr.Gamma(k, j, i));
      const auto s = linalg::svd_rank_kernel(fr.g);
      CHECK(s.singular_values.back() > 0);
    }
  }
}

TEST_CASE("Weingarten residual detects a flipped shape operator") {
  const auto chart = catalog::sphere3(2);
  const auto fr = geometry::frame_at(chart, std::vector<double>{0.7, 0.8, 0.9}, 3);
  double max_dn = 0;
  for (int i = 0; i < 3; ++i) max_dn = std::max(max_dn, linalg::norm(fr.dN.col(i)));
  CHECK(geometry::weingarten_residual(fr, -1.0 * fr.A) == doctest::Approx(2 * max_dn).epsilon(1e-10));
}

TEST_CASE("decompose_ambient") {
  const auto chart = catalog::sphere3(2);
  const auto fr = geometry::frame_at(chart, std::vector<double>{0.7, 0.8, 0.9}, 2);
  auto split = geometry::decompose_ambient(fr, fr.N);
  CHECK(split.normal == doctest::Approx(1));
  CHECK(linalg::max_abs(split.tangent) < 1e-14);
  split = geometry::decompose_ambient(fr, fr.J.col(0));
  CHECK(std::abs(split.normal) < 1e-14);
  CHECK(split.tangent[0] == doctest::Approx(1));
  CHECK(std::abs(split.tangent[1]) < 1e-14);
  split = geometry::decompose_ambient(fr, fr.f);
  CHECK(split.normal == doctest::Approx(2));
  CHECK(linalg::max_abs(split.tangent) < 1e-13);

  const auto g3 = geometry::frame_at(catalog::graph3(kPhi), std::vector<double>{0.1, -0.2, 0.3}, 2);
  const std::vector<double> z{0.3, -1.2, 0.5, 2.0};
  split = geometry::decompose_ambient(g3, z);
  auto back = g3.J * split.tangent;
  for (int a = 0; a < 4; ++a) CHECK(std::abs(back[a] + split.normal * g3.N[a] - z[a]) < 1e-11);
}

TEST_CASE("gradient and Hessian operator") {
  const auto plane = catalog::plane2();
  const std::vector<double> u{0.4, -0.3};
  auto gh = geometry::scalar_grad_hess(plane, u, expr::parse("3.5", 2));
  CHECK(linalg::max_abs(gh.grad) == 0.0);
  CHECK(gh.hess.max_abs() == 0.0);
  gh = geometry::scalar_grad_hess(plane, u, expr::parse("u1^2", 2));
  CHECK(gh.grad[0] == doctest::Approx(0.8));
  CHECK(gh.grad[1] == doctest::Approx(0));
  CHECK(gh.hess(0, 0) == doctest::Approx(2));
  CHECK(gh.hess(1, 1) == doctest::Approx(0));

  // grad |f|^2 / 2 is the tangential part of f
  const auto chart = catalog::graph3(kPhi);
  const auto half_sq = expr::parse("(u1^2 + u2^2 + u3^2 + (u1^2 + 2*u2^2 + 3*u3^2)^2) / 2", 3);
  for (const auto& p : grid_points(chart, 3)) {
    const auto fr = geometry::frame_at(chart, p, 2);
    const auto split = geometry::decompose_ambient(fr, fr.f);
    const auto r = geometry::scalar_grad_hess(chart, p, half_sq);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(r.grad[i] - split.tangent[i]) < 1e-12);
    CHECK(geometry::self_adjoint_residual(fr.g, r.hess) < 1e-11);
  }
}

TEST_CASE("rank of A") {
  CHECK(geometry::rank_A(geometry::frame_at(catalog::plane2(), std::vector<double>{0, 0}, 2)) == 0);
  CHECK(geometry::rank_A(geometry::frame_at(catalog::sphere3(2), std::vector<double>{0.7, 0.7, 0.7}, 2)) == 3);
  CHECK(geometry::rank_A(geometry::frame_at(catalog::sphcyl4(1), std::vector<double>{0.7, 0.7, 0.7, 0}, 2)) == 3);
  CHECK(geometry::rank_A(geometry::frame_at(catalog::torus2(2, 1), std::vector<double>{1, 1}, 2)) == 2);
}

TEST_CASE("finite-difference oracle against jets") {
  const auto plane = catalog::plane2();
  // at the origin the shifted arguments are exact, so differences of a linear
  // map carry no rounding
  const std::vector<double> p{0.0, 0.0};
  const auto ref = geometry::fd_oracle(plane, p);
  const auto fr = geometry::frame_at(plane, p, 2);
  CHECK((ref.J - fr.J).max_abs() < 1e-12);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(ref.d2f(a, i, j)) < 1e-12);

  std::mt19937_64 rng(17);
  for (const auto& chart : {catalog::sphere3(2), catalog::graph3(kPhi)}) {
    const Box box = chart.domain.shrunk(0.05);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> u(3);
      for (int i = 0; i < 3; ++i) u[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
      const auto r = geometry::fd_oracle(chart, u);
      const auto f = geometry::frame_at(chart, u, 2);
      CHECK((r.J - f.J).max_abs() < 1e-5 * std::max(1.0, f.J.max_abs()));
      double scale = 1, diff = 0;
      for (int a = 0; a < 4; ++a)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            scale = std::max(scale, std::abs(f.d2f(a, i, j)));
            diff = std::max(diff, std::abs(r.d2f(a, i, j) - f.d2f(a, i, j)));
          }
      CHECK(diff < 1e-5 * scale);
    }
  }
}

TEST_CASE("chart validation and point errors") {
  const auto ok = Chart::from_strings("cyl", {"cos(u1)", "sin(u1)", "u2"}, {{0, -1}, {3, 1}});
  CHECK(ok.n == 2);
  CHECK_THROWS_AS(Chart::from_strings("bad", {"u1", "u1", "u1"}, {{0, 0}, {1, 1}}), HypothesisError);
  CHECK_THROWS_AS(Chart::from_strings("short", {"u1", "u1^2"}, {{0, 0}, {1, 1}}), DimensionError);
  CHECK_THROWS_AS(Chart::from_strings("box", {"u1", "u2", "0"}, {{0, 1}, {1, 1}}), DimensionError);
  CHECK_THROWS_AS(Chart::from_strings("syntax", {"u1 +", "u2", "0"}, {{0, 0}, {1, 1}}), ParseError);
  CHECK_THROWS_AS(geometry::frame_at(catalog::sphere3(2), std::vector<double>{0, 0.7, 0.7}, 2), DimensionError);
  // sin(u1) = 0 is outside the sphere's box, but a degenerate point inside a
  // user box must be rejected
  const auto cone = Chart::from_strings("cone", {"u1*cos(u2)", "u1*sin(u2)", "u1"}, {{-1, 0}, {1.5, 1}});
  CHECK_THROWS_AS(geometry::frame_at(cone, std::vector<double>{0, 0.5}, 2), HypothesisError);
}
