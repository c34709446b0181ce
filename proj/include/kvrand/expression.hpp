#ifndef KVRAND_EXPRESSION_HPP
#define KVRAND_EXPRESSION_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kvrand {

/**
 * Parsed density expression in the single variable x.
 *
 * Grammar, loosest binding first:
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('-' | '+') unary | power
 *   power   := primary ('^' unary)?          right associative
 *   primary := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
 *   func    := sin cos tan exp ln sqrt abs erf
 *
 * So -2^2 == -4 and 2^3^2 == 512. Evaluation follows the tree exactly, one
 * libm call or IEEE operation per node; domain errors yield NaN.
 */
class ExpressionAst {
 public:
  enum class Op : std::uint8_t {
    Number,
    Variable,
    Constant,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Erf,
  };

  struct Node {
    Node(Op o = Op::Number) : op(o) {}  // NOLINT(google-explicit-constructor)

    Op op;
    double value = 0.0;  // Number / Constant
    int lhs = -1;
    int rhs = -1;
    std::string name;    // Constant spelling
  };

  double operator()(double x) const { return eval(root_, x); }
  double evaluate(double x) const { return eval(root_, x); }

  /// Structural dump, e.g. Add(Sin(x), Cos(Mul(5, x))).
  std::string to_string() const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  int root() const noexcept { return root_; }

 private:
  friend class ExpressionParser;

  double eval(int index, double x) const;
  std::string dump(int index) const;

  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Throws SyntaxError (with position and expected tokens) or an Error with
/// code UnknownIdentifier.
ExpressionAst parse_expression(std::string_view text);

}  // namespace kvrand

#endif  // KVRAND_EXPRESSION_HPP
