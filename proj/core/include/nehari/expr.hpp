#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari {

using Point = std::array<double, 3>;

// Closed-form scalar expression in the spatial variables x1, x2, x3.
// Grammar: + - * / ^ (right-associative), unary minus, parentheses, numeric
// literals, and the functions sin, cos, exp, abs.  Parsed once into a postfix
// program; evaluation is allocation-free.
class Expr {
 public:
  static Expr parse(std::string_view text);

  double eval(const Point& x) const noexcept;

  // True when any of x1..x3 appears in the expression.
  bool depends_on_x() const noexcept { return depends_on_x_; }

  const std::string& text() const noexcept { return text_; }

 private:
  enum class Op : std::uint8_t {
    push_const,
    push_x1,
    push_x2,
    push_x3,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    sin,
    cos,
    exp,
    abs,
  };

  struct Instr {
    Op op;
    double value;  // only for push_const
  };

  friend class ExprParser;

  std::vector<Instr> program_;
  std::string text_;
  bool depends_on_x_ = false;
};

// Spatial weight: either a constant or a parsed expression.  Expressions
// without any x-dependence are folded to constants at parse time.
class Weight {
 public:
  Weight() : constant_(0.0), is_constant_(true) {}
  Weight(double c) : constant_(c), is_constant_(true) {}  // NOLINT(implicit)

  static Weight constant(double c) { return Weight(c); }
  static Weight expression(std::string_view text);

  // Parses `text` as an expression; pure numbers become constants.
  static Weight parse(std::string_view text) { return expression(text); }

  double operator()(const Point& x) const noexcept {
    return is_constant_ ? constant_ : expr_->eval(x);
  }

  bool is_constant() const noexcept { return is_constant_; }

  // Pre: is_constant().
  double constant_value() const noexcept { return constant_; }

  // Canonical text used in digests and reports.
  std::string describe() const;

 private:
  double constant_;
  bool is_constant_;
  std::shared_ptr<const Expr> expr_;
};

}  // namespace nehari
