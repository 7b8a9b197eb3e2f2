#include "tout/expression.hpp"

#include <cctype>
#include <charconv>
#include <limits>

#include "tout/error.hpp"

namespace tout {

Expression Expression::literal(std::int64_t value) {
  auto node = std::make_shared<Node>();
  node->is_literal = true;
  node->value = value;
  return Expression(std::move(node));
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs) {
  auto node = std::make_shared<Node>();
  node->is_literal = false;
  node->op = op;
  node->lhs = std::make_shared<const Expression>(std::move(lhs));
  node->rhs = std::make_shared<const Expression>(std::move(rhs));
  return Expression(std::move(node));
}

std::int64_t Expression::literal_value() const {
  if (!node_->is_literal) throw InvalidArgument("expression node is not a literal");
  return node_->value;
}

BinaryOp Expression::op() const {
  if (node_->is_literal) throw InvalidArgument("expression node is a literal");
  return node_->op;
}

const Expression& Expression::lhs() const {
  if (node_->is_literal) throw InvalidArgument("expression node is a literal");
  return *node_->lhs;
}

const Expression& Expression::rhs() const {
  if (node_->is_literal) throw InvalidArgument("expression node is a literal");
  return *node_->rhs;
}

Rational Expression::eval() const {
  if (node_->is_literal) return Rational(node_->value);
  const Rational a = node_->lhs->eval();
  const Rational b = node_->rhs->eval();
  switch (node_->op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
  }
  throw InvalidArgument("unknown operator");
}

std::vector<std::int64_t> Expression::literals() const {
  if (node_->is_literal) return {node_->value};
  auto out = node_->lhs->literals();
  auto right = node_->rhs->literals();
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

namespace {

int precedence(const Expression& e) {
  if (e.is_literal()) return 3;
  return (e.op() == BinaryOp::add || e.op() == BinaryOp::sub) ? 1 : 2;
}

}  // namespace

std::string Expression::to_string() const {
  if (node_->is_literal) return std::to_string(node_->value);
  const int p = precedence(*this);
  std::string left = node_->lhs->to_string();
  std::string right = node_->rhs->to_string();
  if (precedence(*node_->lhs) < p) left = "(" + left + ")";
  if (precedence(*node_->rhs) <= p) right = "(" + right + ")";
  return left + static_cast<char>(node_->op) + right;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.is_literal() != b.is_literal()) return false;
  if (a.is_literal()) return a.node_->value == b.node_->value;
  return a.node_->op == b.node_->op && *a.node_->lhs == *b.node_->lhs && *a.node_->rhs == *b.node_->rhs;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse() {
    Expression e = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_).starts_with(token)) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  std::optional<BinaryOp> additive() {
    skip_space();
    if (consume("+")) return BinaryOp::add;
    if (consume("-") || consume("\xE2\x88\x92")) return BinaryOp::sub;  // U+2212
    return std::nullopt;
  }

  std::optional<BinaryOp> multiplicative() {
    skip_space();
    if (consume("*") || consume("x") || consume("X") || consume("\xC3\x97")) return BinaryOp::mul;  // U+00D7
    if (consume("/") || consume("\xC3\xB7")) return BinaryOp::div;                                  // U+00F7
    return std::nullopt;
  }

  Expression expression() {
    Expression e = term();
    while (auto op = additive()) e = Expression::binary(*op, std::move(e), term());
    return e;
  }

  Expression term() {
    Expression e = factor();
    while (auto op = multiplicative()) e = Expression::binary(*op, std::move(e), factor());
    return e;
  }

  Expression factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (consume("(")) {
      Expression e = expression();
      skip_space();
      if (!consume(")")) fail("expected ')'");
      return e;
    }
    if (!std::isdigit(static_cast<unsigned char>(text_[pos_]))) fail("expected a number or '('");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == ',')) fail("non-integer literal");
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{}) {
      pos_ = start;
      fail("integer literal out of range");
    }
    return Expression::literal(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text) { return Parser(text).parse(); }

Rational eval_expression(const Expression& expression) { return expression.eval(); }

}  // namespace tout
