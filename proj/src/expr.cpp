#include "isodeform/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::expr {

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n_vars) : text_(text), n_vars_(n_vars) {}

  Node parse_all() {
    Node node = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) fail(fmt::format("unexpected '{}'", text_[pos_]));
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    throw ParseError(fmt::format("syntax error at offset {}: {}", at, what), at);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static Node binary(BinaryOp op, Node lhs, Node rhs) {
    Node node;
    node.kind = NodeKind::Binary;
    node.op = op;
    node.span = {lhs.span.begin, rhs.span.end};
    node.children.push_back(std::move(lhs));
    node.children.push_back(std::move(rhs));
    return node;
  }

  Node parse_expr() {
    Node lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(BinaryOp::Add, std::move(lhs), parse_term());
      } else if (accept('-')) {
        lhs = binary(BinaryOp::Sub, std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  Node parse_term() {
    Node lhs = parse_power();
    for (;;) {
      if (accept('*')) {
        lhs = binary(BinaryOp::Mul, std::move(lhs), parse_power());
      } else if (accept('/')) {
        lhs = binary(BinaryOp::Div, std::move(lhs), parse_power());
      } else {
        return lhs;
      }
    }
  }

  Node parse_power() {
    Node base = parse_unary();
    if (accept('^')) return binary(BinaryOp::Pow, std::move(base), parse_power());
    return base;
  }

  Node parse_unary() {
    skip_ws();
    const std::size_t start = pos_;
    if (accept('-')) {
      Node node;
      node.kind = NodeKind::Negate;
      node.children.push_back(parse_unary());
      node.span = {start, node.children.front().span.end};
      return node;
    }
    return parse_primary();
  }

  Node parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Node inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      inner.span = {start, pos_};
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(fmt::format("unexpected '{}'", c));
  }

  Node parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail_at(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent");
    }
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      fail("implicit multiplication is not allowed");
    Node node;
    node.kind = NodeKind::Number;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, node.number);
    if (res.ec != std::errc() || !std::isfinite(node.number)) fail_at(start, "number out of range");
    node.span = {start, pos_};
    return node;
  }

  Node parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';

    static constexpr std::pair<std::string_view, Function> kFunctions[] = {
        {"sin", Function::Sin}, {"cos", Function::Cos}, {"exp", Function::Exp},
        {"log", Function::Log}, {"sqrt", Function::Sqrt}};
    for (const auto& [fname, fn] : kFunctions) {
      if (name != fname) continue;
      if (!call) fail_at(start, fmt::format("function '{}' requires a parenthesized argument", name));
      ++pos_;
      Node node;
      node.kind = NodeKind::Call;
      node.function = fn;
      node.children.push_back(parse_expr());
      while (accept(',')) node.children.push_back(parse_expr());
      if (!accept(')')) fail("expected ')'");
      if (node.children.size() != 1)
        fail_at(start, fmt::format("wrong arity: '{}' takes 1 argument, got {}", name, node.children.size()));
      node.span = {start, pos_};
      return node;
    }
    if (call) fail_at(start, fmt::format("unknown function '{}'", name));

    Node node;
    node.span = {start, start + name.size()};
    if (name == "pi") {
      node.kind = NodeKind::Pi;
      return node;
    }
    if (name.size() >= 2 && name[0] == 'u' &&
        name.substr(1).find_first_not_of("0123456789") == std::string_view::npos) {
      int index = 0;
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (res.ec != std::errc() || index < 1 || index > n_vars_)
        fail_at(start, fmt::format("variable index out of range: '{}' with n = {}", name, n_vars_));
      node.kind = NodeKind::Variable;
      node.variable = index - 1;
      return node;
    }
    fail_at(start, fmt::format("unknown identifier '{}'", name));
  }

  std::string_view text_;
  int n_vars_;
  std::size_t pos_ = 0;
};

void print_node(const Node& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::Number:
      out += fmt::format("{}", node.number);
      return;
    case NodeKind::Variable:
      out += fmt::format("u{}", node.variable + 1);
      return;
    case NodeKind::Pi:
      out += "pi";
      return;
    case NodeKind::Negate:
      out += "(-";
      print_node(node.children[0], out);
      out += ')';
      return;
    case NodeKind::Binary: {
      static constexpr char kOps[] = {'+', '-', '*', '/', '^'};
      out += '(';
      print_node(node.children[0], out);
      out += ' ';
      out += kOps[static_cast<int>(node.op)];
      out += ' ';
      print_node(node.children[1], out);
      out += ')';
      return;
    }
    case NodeKind::Call: {
      static constexpr const char* kNames[] = {"sin", "cos", "exp", "log", "sqrt"};
      out += kNames[static_cast<int>(node.function)];
      out += '(';
      print_node(node.children[0], out);
      out += ')';
      return;
    }
  }
}

class JetEvaluator {
 public:
  JetEvaluator(const ExprAst& ast, std::span<const double> point, int order)
      : ast_(ast), point_(point), order_(order) {}

  jet::JetScalar eval(const Node& node) const {
    using jet::JetScalar;
    const int n = ast_.n_vars();
    switch (node.kind) {
      case NodeKind::Number:
        return JetScalar::constant(node.number, n, order_);
      case NodeKind::Pi:
        return JetScalar::constant(std::numbers::pi, n, order_);
      case NodeKind::Variable:
        return JetScalar::variable(node.variable, point_[node.variable], n, order_);
      case NodeKind::Negate:
        return -eval(node.children[0]);
      case NodeKind::Binary: {
        if (node.op == BinaryOp::Pow && is_constant(node.children[1])) {
          const double r = evaluate_constant(node.children[1]);
          const JetScalar base = eval(node.children[0]);
          return guarded(node, [&] { return jet::pow(base, r); });
        }
        const JetScalar lhs = eval(node.children[0]);
        const JetScalar rhs = eval(node.children[1]);
        return guarded(node, [&] {
          switch (node.op) {
            case BinaryOp::Add: return lhs + rhs;
            case BinaryOp::Sub: return lhs - rhs;
            case BinaryOp::Mul: return lhs * rhs;
            case BinaryOp::Div: return lhs / rhs;
            case BinaryOp::Pow: return jet::exp(rhs * jet::log(lhs));
          }
          return lhs;
        });
      }
      case NodeKind::Call: {
        const JetScalar arg = eval(node.children[0]);
        return guarded(node, [&] {
          switch (node.function) {
            case Function::Sin: return jet::sin(arg);
            case Function::Cos: return jet::cos(arg);
            case Function::Exp: return jet::exp(arg);
            case Function::Log: return jet::log(arg);
            case Function::Sqrt: return jet::sqrt(arg);
          }
          return arg;
        });
      }
    }
    throw Error("expr: corrupt node");
  }

 private:
  double evaluate_constant(const Node& node) const {
    std::vector<double> none(static_cast<std::size_t>(ast_.n_vars()), 0.0);
    return evaluate(ExprAst(std::make_shared<const Node>(node), ast_.n_vars(), ""), none);
  }

  template <class Fn>
  jet::JetScalar guarded(const Node& node, Fn&& fn) const {
    try {
      return fn();
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("{} in '{}' at offset {}..{}", e.what(),
                                    ast_.source().substr(node.span.begin, node.span.end - node.span.begin),
                                    node.span.begin, node.span.end),
                        e.offending());
    }
  }

  const ExprAst& ast_;
  std::span<const double> point_;
  int order_;
};

double evaluate_node(const Node& node, std::span<const double> point) {
  switch (node.kind) {
    case NodeKind::Number:
      return node.number;
    case NodeKind::Pi:
      return std::numbers::pi;
    case NodeKind::Variable:
      return point[node.variable];
    case NodeKind::Negate:
      return -evaluate_node(node.children[0], point);
    case NodeKind::Binary: {
      const double a = evaluate_node(node.children[0], point);
      const double b = evaluate_node(node.children[1], point);
      switch (node.op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
          if (std::abs(b) <= jet::kDivisionGuard) throw DomainError("division by (near-)zero value", b);
          return a / b;
        case BinaryOp::Pow:
          if (b != std::floor(b) && !(a > 0.0))
            throw DomainError(fmt::format("non-integer power {} of non-positive value {}", b, a), a);
          return std::pow(a, b);
      }
      break;
    }
    case NodeKind::Call: {
      const double a = evaluate_node(node.children[0], point);
      switch (node.function) {
        case Function::Sin: return std::sin(a);
        case Function::Cos: return std::cos(a);
        case Function::Exp: return std::exp(a);
        case Function::Log:
          if (!(a > 0.0)) throw DomainError(fmt::format("log of non-positive value {}", a), a);
          return std::log(a);
        case Function::Sqrt:
          if (a < 0.0) throw DomainError(fmt::format("sqrt of negative value {}", a), a);
          return std::sqrt(a);
      }
      break;
    }
  }
  throw Error("expr: corrupt node");
}

}  // namespace

ExprAst parse(std::string_view text, int n_vars) {
  if (n_vars < 1 || n_vars > jet::kMaxVars)
    throw DimensionError(fmt::format("expr: n_vars={} outside [1, {}]", n_vars, jet::kMaxVars));
  Parser parser(text, n_vars);
  return ExprAst(std::make_shared<const Node>(parser.parse_all()), n_vars, std::string(text));
}

std::string print(const ExprAst& ast) {
  std::string out;
  print_node(ast.root(), out);
  return out;
}

bool same_structure(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case NodeKind::Number:
      if (a.number != b.number) return false;
      break;
    case NodeKind::Variable:
      if (a.variable != b.variable) return false;
      break;
    case NodeKind::Binary:
      if (a.op != b.op) return false;
      break;
    case NodeKind::Call:
      if (a.function != b.function) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_structure(a.children[i], b.children[i])) return false;
  return true;
}

bool is_constant(const Node& node) {
  if (node.kind == NodeKind::Variable) return false;
  for (const auto& child : node.children)
    if (!is_constant(child)) return false;
  return true;
}

jet::JetScalar eval_jet(const ExprAst& ast, std::span<const double> point, int order) {
  if (static_cast<int>(point.size()) != ast.n_vars())
    throw DimensionError(fmt::format("expr: point has {} coordinates, expression expects {}", point.size(),
                                     ast.n_vars()));
  return JetEvaluator(ast, point, order).eval(ast.root());
}

double evaluate(const ExprAst& ast, std::span<const double> point) {
  if (static_cast<int>(point.size()) != ast.n_vars())
    throw DimensionError(fmt::format("expr: point has {} coordinates, expression expects {}", point.size(),
                                     ast.n_vars()));
  return evaluate_node(ast.root(), point);
}

}  // namespace isodeform::expr
