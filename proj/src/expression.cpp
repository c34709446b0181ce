#include "kvrand/expression.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "kvrand/error.hpp"

namespace kvrand {

namespace {

struct FunctionName {
  std::string_view name;
  ExpressionAst::Op op;
};

constexpr FunctionName kFunctions[] = {
    {"sin", ExpressionAst::Op::Sin},   {"cos", ExpressionAst::Op::Cos},
    {"tan", ExpressionAst::Op::Tan},   {"exp", ExpressionAst::Op::Exp},
    {"ln", ExpressionAst::Op::Ln},     {"sqrt", ExpressionAst::Op::Sqrt},
    {"abs", ExpressionAst::Op::Abs},   {"erf", ExpressionAst::Op::Erf},
};

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const char* op_label(ExpressionAst::Op op) {
  using Op = ExpressionAst::Op;
  switch (op) {
    case Op::Negate: return "Neg";
    case Op::Add: return "Add";
    case Op::Sub: return "Sub";
    case Op::Mul: return "Mul";
    case Op::Div: return "Div";
    case Op::Pow: return "Pow";
    case Op::Sin: return "Sin";
    case Op::Cos: return "Cos";
    case Op::Tan: return "Tan";
    case Op::Exp: return "Exp";
    case Op::Ln: return "Ln";
    case Op::Sqrt: return "Sqrt";
    case Op::Abs: return "Abs";
    case Op::Erf: return "Erf";
    default: return "?";
  }
}

}  // namespace

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  ExpressionAst parse() {
    ast_.root_ = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail({"operator", "end of input"});
    return std::move(ast_);
  }

 private:
  using Op = ExpressionAst::Op;

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        lhs = binary(Op::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      skip_space();
      if (accept('*')) {
        lhs = binary(Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    skip_space();
    if (accept('-')) return unary(Op::Negate, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    skip_space();
    if (accept('^')) return binary(Op::Pow, base, parse_unary());
    return base;
  }

  int parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail(operand_tokens());
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (accept('(')) {
      const int inner = parse_expr();
      expect(')');
      return inner;
    }
    fail(operand_tokens());
  }

  int parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      pos_ = start;
      fail({"number"});
    }
    ExpressionAst::Node node{Op::Number};
    node.value = value;
    return push(std::move(node));
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view word = text_.substr(start, pos_ - start);
    if (word == "x") return push({Op::Variable});
    if (word == "pi" || word == "e") {
      ExpressionAst::Node node{Op::Constant};
      node.value = word == "pi" ? std::numbers::pi : std::numbers::e;
      node.name = std::string(word);
      return push(std::move(node));
    }
    for (const auto& fn : kFunctions) {
      if (word == fn.name) {
        skip_space();
        expect('(');
        const int arg = parse_expr();
        expect(')');
        return unary(fn.op, arg);
      }
    }
    throw Error(ErrorCode::UnknownIdentifier, "unknown identifier '" + std::string(word) +
                                                  "' at position " + std::to_string(start));
  }

  static std::vector<std::string> operand_tokens() {
    return {"number", "identifier", "'('", "'-'"};
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (!accept(c)) fail({std::string("'") + c + "'"});
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string msg = "syntax error at position " + std::to_string(pos_) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += (i + 1 == expected.size()) ? " or " : ", ";
      msg += expected[i];
    }
    msg += pos_ < text_.size() ? std::string(", found '") + text_[pos_] + "'" : ", found end of input";
    throw SyntaxError(pos_, std::move(expected), msg);
  }

  int push(ExpressionAst::Node node) {
    ast_.nodes_.push_back(std::move(node));
    return static_cast<int>(ast_.nodes_.size() - 1);
  }

  int unary(Op op, int arg) {
    ExpressionAst::Node node{op};
    node.lhs = arg;
    return push(std::move(node));
  }

  int binary(Op op, int lhs, int rhs) {
    ExpressionAst::Node node{op};
    node.lhs = lhs;
    node.rhs = rhs;
    return push(std::move(node));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  ExpressionAst ast_;
};

ExpressionAst parse_expression(std::string_view text) { return ExpressionParser(text).parse(); }

double ExpressionAst::eval(int index, double x) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  switch (n.op) {
    case Op::Number:
    case Op::Constant: return n.value;
    case Op::Variable: return x;
    case Op::Negate: return -eval(n.lhs, x);
    case Op::Add: return eval(n.lhs, x) + eval(n.rhs, x);
    case Op::Sub: return eval(n.lhs, x) - eval(n.rhs, x);
    case Op::Mul: return eval(n.lhs, x) * eval(n.rhs, x);
    case Op::Div: return eval(n.lhs, x) / eval(n.rhs, x);
    case Op::Pow: return std::pow(eval(n.lhs, x), eval(n.rhs, x));
    case Op::Sin: return std::sin(eval(n.lhs, x));
    case Op::Cos: return std::cos(eval(n.lhs, x));
    case Op::Tan: return std::tan(eval(n.lhs, x));
    case Op::Exp: return std::exp(eval(n.lhs, x));
    case Op::Ln: return std::log(eval(n.lhs, x));
    case Op::Sqrt: return std::sqrt(eval(n.lhs, x));
    case Op::Abs: return std::abs(eval(n.lhs, x));
    case Op::Erf: return std::erf(eval(n.lhs, x));
  }
  return std::nan("");
}

std::string ExpressionAst::dump(int index) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  switch (n.op) {
    case Op::Number: return format_number(n.value);
    case Op::Constant: return n.name;
    case Op::Variable: return "x";
    default: break;
  }
  std::string out = op_label(n.op);
  out += '(';
  out += dump(n.lhs);
  if (n.rhs >= 0) {
    out += ", ";
    out += dump(n.rhs);
  }
  out += ')';
  return out;
}

std::string ExpressionAst::to_string() const { return dump(root_); }

}  // namespace kvrand
