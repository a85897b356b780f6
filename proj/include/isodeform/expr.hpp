#pragma once

// Arithmetic expression DSL used for chart components, scalar fields and
// explicit tensor entries.
//
//   expr    := term (('+' | '-') term)*
//   term    := power (('*' | '/') power)*
//   power   := unary ('^' power)?            right associative
//   unary   := '-' unary | primary
//   primary := number | 'pi' | 'u'<index> | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | log | sqrt
//
// Unary minus binds tighter than '^': "-u1^2" means (-u1)^2. Variables are
// u1..un (1-based). There is no implicit multiplication.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isodeform/jet.hpp"

namespace isodeform::expr {

enum class NodeKind { Number, Variable, Pi, Negate, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Exp, Log, Sqrt };

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;          // Number
  int variable = 0;             // Variable, 0-based
  BinaryOp op = BinaryOp::Add;  // Binary
  Function function = Function::Sin;  // Call
  std::vector<Node> children;
  Span span;
};

/// Immutable parsed expression over n variables.
class ExprAst {
 public:
  ExprAst(std::shared_ptr<const Node> root, int n_vars, std::string source)
      : root_(std::move(root)), n_vars_(n_vars), source_(std::move(source)) {}

  const Node& root() const { return *root_; }
  int n_vars() const { return n_vars_; }
  const std::string& source() const { return source_; }

 private:
  std::shared_ptr<const Node> root_;
  int n_vars_;
  std::string source_;
};

/// Throws ParseError carrying the byte offset of the problem.
ExprAst parse(std::string_view text, int n_vars);

/// Fully parenthesized text that reparses to a structurally identical tree.
std::string print(const ExprAst& ast);

/// Structural equality, ignoring source spans.
bool same_structure(const Node& a, const Node& b);

/// True when the expression references no variable.
bool is_constant(const Node& node);

/// Jet of the expression at `point`; variables are seeded with jet seeds.
/// Domain errors are rethrown with the offending source span in the message.
jet::JetScalar eval_jet(const ExprAst& ast, std::span<const double> point, int order);

/// Plain double evaluation (shares no code with eval_jet).
double evaluate(const ExprAst& ast, std::span<const double> point);

}  // namespace isodeform::expr
