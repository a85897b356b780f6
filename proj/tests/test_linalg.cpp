#include <doctest.h>

#include <cmath>
#include <random>

#include "isodeform/catalog.hpp"
#include "isodeform/error.hpp"
#include "isodeform/geometry.hpp"
#include "isodeform/linalg.hpp"

using namespace isodeform;
using linalg::Mat;

namespace {

Mat random_mat(std::mt19937_64& rng, int r, int c) {
  std::uniform_real_distribution<double> d(-1, 1);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

}  // namespace

TEST_CASE("solve") {
  const Mat b(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK((linalg::solve(Mat::identity(2), b) - b).max_abs() == 0.0);
  const Mat x = linalg::solve(Mat(2, 2, {2, 0, 0, 4}), Mat(2, 1, {1, 1}));
  CHECK(x(0, 0) == doctest::Approx(0.5));
  CHECK(x(1, 0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(linalg::solve(Mat(2, 2, {1, 2, 2, 4}), Mat(2, 1, {1, 1})), NumericalError);
  CHECK_THROWS_AS(linalg::solve(Mat(2, 3), Mat(2, 1)), DimensionError);
  CHECK_THROWS_AS(Mat(2, 2, {1, NAN, 0, 1}), NumericalError);
  CHECK_THROWS_AS(Mat(2, 2, {1, 2, 3}), DimensionError);
}

TEST_CASE("property: random well-conditioned solves") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const Mat a = random_mat(rng, 4, 4) + 4.0 * Mat::identity(4);
    CHECK((a * linalg::solve(a, Mat::identity(4)) - Mat::identity(4)).max_abs() < 1e-10);
    CHECK(linalg::determinant(a) * linalg::determinant(linalg::inverse(a)) == doctest::Approx(1));
  }
}

TEST_CASE("svd rank and kernel") {
  const auto z = linalg::svd_rank_kernel(Mat(3, 3));
  CHECK(z.rank == 0);
  CHECK(z.kernel.cols() == 3);

  const std::vector<double> d{2, 1, 1e-15};
  const auto s = linalg::svd_rank_kernel(Mat::diagonal(d), 1e-9);
  CHECK(s.rank == 2);
  REQUIRE(s.kernel.cols() == 1);
  CHECK(std::abs(s.kernel(2, 0)) == doctest::Approx(1));
  CHECK(s.singular_values[0] == doctest::Approx(2));
}

TEST_CASE("property: svd reconstruction") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const int r = 2 + k % 4, c = 2 + (k / 4) % 4;
    const Mat a = random_mat(rng, r, c);
    const auto s = linalg::svd_rank_kernel(a);
    const int m = std::min(r, c);
    Mat sigma(m, c);
    for (int i = 0; i < m; ++i) sigma(i, i) = s.singular_values[i];
    const Mat back = s.u * sigma * s.v.transposed();
    CHECK((back - a).max_abs() < 1e-11 * std::max(1.0, s.singular_values[0]));
    for (int i = 1; i < m; ++i) CHECK(s.singular_values[i - 1] >= s.singular_values[i]);
  }
}

TEST_CASE("spherical cylinder shape operator has a one-dimensional kernel") {
  const auto chart = catalog::sphcyl4(1);
  const std::vector<double> u{0.7, 0.8, 0.9, 0.1};
  const auto fr = geometry::frame_at(chart, u, 2);
  const auto s = linalg::svd_rank_kernel(fr.A);
  CHECK(s.rank == 3);
  REQUIRE(s.kernel.cols() == 1);
  CHECK(std::abs(s.kernel(3, 0)) == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("generalized cross product") {
  Mat j(3, 2);
  j(0, 0) = 1;
  j(1, 1) = 1;
  auto v = linalg::generalized_cross(j);
  CHECK(v[0] == doctest::Approx(0));
  CHECK(v[1] == doctest::Approx(0));
  CHECK(v[2] == doctest::Approx(1));

  Mat k(3, 2);
  k(0, 0) = 1;
  k(2, 1) = 1;
  v = linalg::generalized_cross(k);
  CHECK(v[1] == doctest::Approx(-1));

  CHECK_THROWS_AS(linalg::generalized_cross(Mat(3, 2)), HypothesisError);

  // sphere: radial to 1e-12
  const auto chart = catalog::sphere3(2);
  const std::vector<double> u{0.6, 0.9, 0.5};
  const auto fr = geometry::frame_at(chart, u, 2);
  const auto n = linalg::generalized_cross(fr.J);
  CHECK(std::abs(std::abs(linalg::dot(n, fr.f)) / 2 - 1) < 1e-12);
}

TEST_CASE("property: cross product is orthogonal to the columns") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 4;
    const Mat j = random_mat(rng, n + 1, n);
    const auto v = linalg::generalized_cross(j);
    CHECK(linalg::norm(v) == doctest::Approx(1));
    for (int c = 0; c < n; ++c) {
      const auto col = j.col(c);
      CHECK(std::abs(linalg::dot(v, col)) < 1e-12 * linalg::norm(col));
    }
  }
}

TEST_CASE("principal angles") {
  Mat a(3, 1), b(3, 1);
  a(0, 0) = 1;
  b(0, 0) = std::cos(0.3);
  b(1, 0) = std::sin(0.3);
  CHECK(linalg::largest_principal_angle(a, b) == doctest::Approx(0.3));
  CHECK(linalg::largest_principal_angle(a, a) == doctest::Approx(0));
}
