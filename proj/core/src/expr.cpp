#include "nehari/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace nehari {

namespace {

struct Token {
  enum Kind { number, ident, op, lparen, rparen, end } kind;
  double value = 0.0;
  std::string text;
  char symbol = 0;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ >= s_.size()) return {Token::end, 0.0, "", 0, pos_};
    const std::size_t start = pos_;
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.data() + pos_;
      char* parse_end = nullptr;
      // strtod accepts scientific notation, which from_chars on this
      // toolchain handles as well; strtod keeps the code path simple.
      const double v = std::strtod(begin, &parse_end);
      if (parse_end == begin) throw ExprError("invalid numeric literal at position " + std::to_string(pos_));
      const auto len = static_cast<std::size_t>(parse_end - begin);
      pos_ += len;
      return {Token::number, v, std::string(begin, len), 0, start};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t e = pos_;
      while (e < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[e])) || s_[e] == '_'))
        ++e;
      Token t{Token::ident, 0.0, std::string(s_.substr(pos_, e - pos_)), 0, start};
      pos_ = e;
      return t;
    }
    ++pos_;
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        return {Token::op, 0.0, std::string(1, c), c, start};
      case '(':
        return {Token::lparen, 0.0, "(", c, start};
      case ')':
        return {Token::rparen, 0.0, ")", c, start};
      default:
        throw ExprError(std::string("unexpected character '") + c + "' at position " + std::to_string(start));
    }
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : lexer_(text) { advance(); }

  Expr run(std::string_view text) {
    Expr e;
    e.text_ = std::string(text);
    parse_expr(e);
    if (cur_.kind != Token::end)
      throw ExprError("trailing input at position " + std::to_string(cur_.pos));
    if (e.program_.empty()) throw ExprError("empty expression");
    check_stack(e);
    return e;
  }

 private:
  using Op = Expr::Op;

  void advance() { cur_ = lexer_.next(); }

  bool accept_op(char c) {
    if (cur_.kind == Token::op && cur_.symbol == c) {
      advance();
      return true;
    }
    return false;
  }

  void parse_expr(Expr& e) {
    parse_term(e);
    for (;;) {
      if (accept_op('+')) {
        parse_term(e);
        e.program_.push_back({Op::add, 0.0});
      } else if (accept_op('-')) {
        parse_term(e);
        e.program_.push_back({Op::sub, 0.0});
      } else {
        return;
      }
    }
  }

  void parse_term(Expr& e) {
    parse_factor(e);
    for (;;) {
      if (accept_op('*')) {
        parse_factor(e);
        e.program_.push_back({Op::mul, 0.0});
      } else if (accept_op('/')) {
        parse_factor(e);
        e.program_.push_back({Op::div, 0.0});
      } else {
        return;
      }
    }
  }

  // factor := unary ('^' factor)?   (right-associative)
  void parse_factor(Expr& e) {
    parse_unary(e);
    if (accept_op('^')) {
      parse_factor(e);
      e.program_.push_back({Op::pow, 0.0});
    }
  }

  void parse_unary(Expr& e) {
    if (accept_op('-')) {
      parse_unary(e);
      e.program_.push_back({Op::neg, 0.0});
      return;
    }
    if (accept_op('+')) {
      parse_unary(e);
      return;
    }
    parse_primary(e);
  }

  void parse_primary(Expr& e) {
    switch (cur_.kind) {
      case Token::number: {
        e.program_.push_back({Op::push_const, cur_.value});
        advance();
        return;
      }
      case Token::lparen: {
        advance();
        parse_expr(e);
        expect_rparen();
        return;
      }
      case Token::ident: {
        const std::string name = cur_.text;
        advance();
        if (name == "x1" || name == "x2" || name == "x3") {
          e.depends_on_x_ = true;
          e.program_.push_back(
              {name == "x1" ? Op::push_x1 : name == "x2" ? Op::push_x2 : Op::push_x3, 0.0});
          return;
        }
        Op fn;
        if (name == "sin") fn = Op::sin;
        else if (name == "cos") fn = Op::cos;
        else if (name == "exp") fn = Op::exp;
        else if (name == "abs") fn = Op::abs;
        else if (name == "pi") {
          e.program_.push_back({Op::push_const, 3.141592653589793238462643});
          return;
        } else {
          throw ExprError("unknown identifier '" + name + "'");
        }
        if (cur_.kind != Token::lparen)
          throw ExprError("expected '(' after function '" + name + "'");
        advance();
        parse_expr(e);
        expect_rparen();
        e.program_.push_back({fn, 0.0});
        return;
      }
      default:
        throw ExprError("unexpected token at position " + std::to_string(cur_.pos));
    }
  }

  void expect_rparen() {
    if (cur_.kind != Token::rparen)
      throw ExprError("expected ')' at position " + std::to_string(cur_.pos));
    advance();
  }

  // Static stack-depth check so eval can use a fixed buffer.
  void check_stack(const Expr& e) {
    int depth = 0;
    int max_depth = 0;
    for (const auto& in : e.program_) {
      switch (in.op) {
        case Op::push_const: case Op::push_x1: case Op::push_x2: case Op::push_x3:
          ++depth;
          max_depth = std::max(max_depth, depth);
          break;
        case Op::add: case Op::sub: case Op::mul: case Op::div: case Op::pow:
          --depth;
          break;
        default:
          break;  // unary ops keep depth
      }
      if (depth <= 0)
        throw ExprError("malformed expression (operand underflow)");
    }
    if (depth != 1) throw ExprError("malformed expression");
    if (max_depth > 61) throw ExprError("expression too deeply nested");
  }

  Lexer lexer_;
  Token cur_;
};

Expr Expr::parse(std::string_view text) { return ExprParser(text).run(text); }

double Expr::eval(const Point& x) const noexcept {
  double stack[64];
  int top = -1;
  for (const auto& in : program_) {
    switch (in.op) {
      case Op::push_const: stack[++top] = in.value; break;
      case Op::push_x1: stack[++top] = x[0]; break;
      case Op::push_x2: stack[++top] = x[1]; break;
      case Op::push_x3: stack[++top] = x[2]; break;
      case Op::add: stack[top - 1] += stack[top]; --top; break;
      case Op::sub: stack[top - 1] -= stack[top]; --top; break;
      case Op::mul: stack[top - 1] *= stack[top]; --top; break;
      case Op::div: stack[top - 1] /= stack[top]; --top; break;
      case Op::pow: stack[top - 1] = std::pow(stack[top - 1], stack[top]); --top; break;
      case Op::neg: stack[top] = -stack[top]; break;
      case Op::sin: stack[top] = std::sin(stack[top]); break;
      case Op::cos: stack[top] = std::cos(stack[top]); break;
      case Op::exp: stack[top] = std::exp(stack[top]); break;
      case Op::abs: stack[top] = std::fabs(stack[top]); break;
    }
  }
  return stack[0];
}

Weight Weight::expression(std::string_view text) {
  auto parsed = std::make_shared<Expr>(Expr::parse(text));
  Weight w;
  if (!parsed->depends_on_x()) {
    w.constant_ = parsed->eval({0.0, 0.0, 0.0});
    w.is_constant_ = true;
    return w;
  }
  w.is_constant_ = false;
  w.constant_ = 0.0;
  w.expr_ = std::move(parsed);
  return w;
}

std::string Weight::describe() const {
  if (!is_constant_) return expr_->text();
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", constant_);
  return buf;
}

}  // namespace nehari
