#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tout/rational.hpp"

namespace tout {

enum class BinaryOp : char { add = '+', sub = '-', mul = '*', div = '/' };

/// Immutable arithmetic expression tree over integer literals.
/// Copies share subtrees.
class Expression {
 public:
  static Expression literal(std::int64_t value);
  static Expression binary(BinaryOp op, Expression lhs, Expression rhs);

  bool is_literal() const noexcept { return node_->is_literal; }
  std::int64_t literal_value() const;
  BinaryOp op() const;
  const Expression& lhs() const;
  const Expression& rhs() const;

  /// Exact value; throws ArithmeticError on division by zero.
  Rational eval() const;

  /// Leaf literals, left to right.
  std::vector<std::int64_t> literals() const;

  /// Infix text with the minimum parentheses needed to reparse the same tree
  /// (operators of equal precedence on the right are always bracketed).
  std::string to_string() const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  struct Node {
    bool is_literal = true;
    std::int64_t value = 0;
    BinaryOp op = BinaryOp::add;
    std::shared_ptr<const Expression> lhs;
    std::shared_ptr<const Expression> rhs;
  };
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Parses infix arithmetic: + - over * / with left associativity, parentheses,
/// non-negative integer literals, whitespace ignored. "x", "X", "×" are read as
/// multiplication and "÷" as division. Throws ParseError carrying the byte
/// offset of the problem.
Expression parse_expression(std::string_view text);

/// Same as Expression::eval.
Rational eval_expression(const Expression& expression);

}  // namespace tout
