#include <doctest.h>

#include <cmath>
#include <random>

#include "isodeform/acceptance.hpp"
#include "isodeform/error.hpp"
#include "isodeform/expr.hpp"
#include "oracles.hpp"

#include <fmt/format.h>

using namespace isodeform;
using expr::BinaryOp;
using expr::NodeKind;

TEST_CASE("precedence") {
  const auto ast = expr::parse("2*sin(u1)^2 + u2", 2);
  const auto& root = ast.root();
  REQUIRE(root.kind == NodeKind::Binary);
  CHECK(root.op == BinaryOp::Add);
  const auto& mul = root.children[0];
  CHECK(mul.op == BinaryOp::Mul);
  CHECK(mul.children[0].number == 2.0);
  const auto& pw = mul.children[1];
  CHECK(pw.op == BinaryOp::Pow);
  CHECK(pw.children[0].kind == NodeKind::Call);
  CHECK(pw.children[1].number == 2.0);
  CHECK(root.children[1].kind == NodeKind::Variable);
  CHECK(root.children[1].variable == 1);
}

TEST_CASE("unary minus binds tighter than power") {
  const std::vector<double> u{3.0};
  CHECK(expr::evaluate(expr::parse("-u1^2", 1), u) == doctest::Approx(9));
  CHECK(expr::evaluate(expr::parse("-(u1^2)", 1), u) == doctest::Approx(-9));
  CHECK(expr::evaluate(expr::parse("2^3^2", 1), u) == doctest::Approx(512));
  CHECK(expr::evaluate(expr::parse("8 - 3 - 2", 1), u) == doctest::Approx(3));
  CHECK(expr::evaluate(expr::parse("8 / 4 / 2", 1), u) == doctest::Approx(1));
  CHECK(expr::evaluate(expr::parse("2.5e-1 * 4 + pi", 1), u) == doctest::Approx(1 + M_PI));
}

TEST_CASE("parse errors carry offsets") {
  auto offset_of = [](const char* text, int n) -> long {
    try {
      expr::parse(text, n);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("u3", 2) == 0);
  CHECK(offset_of("u1 + u3", 2) == 5);
  CHECK(offset_of("2u1", 1) >= 1);
  CHECK(offset_of("sin(u1", 1) >= 0);
  CHECK(offset_of("foo(u1)", 1) == 0);
  CHECK(offset_of("u1 +", 1) >= 3);
  CHECK(offset_of("", 1) == 0);
  CHECK(offset_of("u0", 1) == 0);
  CHECK(offset_of("(u1))", 1) == 4);
}

TEST_CASE("eval_jet examples") {
  const std::vector<double> p{2.0, 3.0};
  const auto j = expr::eval_jet(expr::parse("u1*u2", 2), p, 2);
  CHECK(j.value() == doctest::Approx(6));
  CHECK(j.d1(0) == doctest::Approx(3));
  CHECK(j.d1(1) == doctest::Approx(2));
  CHECK(j.d2(0, 1) == doctest::Approx(1));

  const std::vector<double> z{0.0};
  const auto e = expr::eval_jet(expr::parse("exp(u1)", 1), z, 3);
  CHECK(e.d1(0) == doctest::Approx(1));
  CHECK(e.d2(0, 0) == doctest::Approx(1));
  CHECK(e.d3(0, 0, 0) == doctest::Approx(1));

  const std::vector<double> q{3.0, 4.0};
  const auto r = expr::eval_jet(expr::parse("sqrt(u1^2+u2^2)", 2), q, 2);
  CHECK(r.value() == doctest::Approx(5));
  CHECK(r.d1(0) == doctest::Approx(0.6));
  CHECK(r.d1(1) == doctest::Approx(0.8));
}

TEST_CASE("domain errors name the source span") {
  const std::vector<double> u{-1.0};
  try {
    expr::eval_jet(expr::parse("1 + log(u1)", 1), u, 2);
    FAIL("no error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("log(u1)") != std::string::npos);
  }
  CHECK_THROWS_AS(expr::evaluate(expr::parse("sqrt(u1)", 1), u), DomainError);
  CHECK_THROWS_AS(expr::evaluate(expr::parse("u1^0.5", 1), u), DomainError);
  CHECK(expr::evaluate(expr::parse("u1^3", 1), u) == doctest::Approx(-1));
}

TEST_CASE("constants") {
  CHECK(expr::is_constant(expr::parse("2*pi + sin(1)", 3).root()));
  CHECK_FALSE(expr::is_constant(expr::parse("2*pi + sin(u3)", 3).root()));
}

TEST_CASE("property: print/parse fixpoint") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 500; ++k) {
    const std::string text = acceptance::random_expression(rng, 5, 3);
    const auto a = expr::parse(text, 3);
    const std::string printed = expr::print(a);
    const auto b = expr::parse(printed, 3);
    CHECK(expr::print(b) == printed);
    CHECK(expr::same_structure(a.root(), b.root()));
  }
}

// Domain-safe random expressions: jets agree with differences of the plain
// evaluator.
TEST_CASE("property: eval_jet against finite differences") {
  std::mt19937_64 rng(3);
  const char* atoms[] = {"u1", "u2", "(u1*u2)", "sin(u2)", "exp(u1/2)", "sqrt(1 + u1^2)", "cos(u1 - u2)", "2.5"};
  const char* ops[] = {"+", "-", "*"};
  std::uniform_int_distribution<int> atom(0, 7), op(0, 2);
  std::uniform_real_distribution<double> coord(-1, 1);
  for (int k = 0; k < 100; ++k) {
    std::string text = atoms[atom(rng)];
    for (int d = 0; d < 5; ++d) text = fmt::format("({} {} {})", text, ops[op(rng)], atoms[atom(rng)]);
    text = fmt::format("{} / (2 + sin({}))", text, atoms[atom(rng)]);
    const auto ast = expr::parse(text, 2);
    const std::vector<double> u{coord(rng), coord(rng)};
    const auto j = expr::eval_jet(ast, u, 2);
    const oracle::Fn plain = [&](const std::vector<double>& v) { return expr::evaluate(ast, v); };
    CHECK(j.value() == doctest::Approx(plain(u)).epsilon(1e-13));
    for (int i = 0; i < 2; ++i) {
      const double r1 = oracle::d1(plain, u, i);
      CHECK(std::abs(j.d1(i) - r1) <= 1e-5 * std::max(1.0, std::abs(r1)));
      for (int m = 0; m < 2; ++m) {
        const double r2 = oracle::d2(plain, u, i, m);
        CHECK(std::abs(j.d2(i, m) - r2) <= 1e-5 * std::max(1.0, std::abs(r2)));
      }
    }
  }
}
