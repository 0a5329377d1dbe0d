/// @file expr.hpp
/// @brief The built-in function catalog used for data f and manufactured u.
///
/// Expressions are arithmetic in the coordinates `x`, `y` and the radius `r`,
/// with `+ - * / ^`, parentheses, numeric literals, `pi`, and the functions
/// `sin cos exp sqrt abs log tanh sinpi cospi`. A function binds tighter than
/// `*` and looser than `^`: `sinpi x * sinpi y` is sin(pi x) sin(pi y) and
/// `sin x^2` is sin(x^2). The form `const c` denotes a constant.
#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>

#include "pqfrac/error.hpp"
#include "pqfrac/field.hpp"

namespace pqfrac {

using Expr = std::function<double(const Vec2&)>;

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expr parse() {
    skip();
    if (pos_ == src_.size()) fail("empty expression");
    Expr e = expression();
    skip();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw UnknownExpression("cannot parse '" + std::string(src_) + "': " + why);
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        Expr rhs = term();
        lhs = [lhs, rhs](const Vec2& x) { return lhs(x) + rhs(x); };
      } else if (accept('-')) {
        Expr rhs = term();
        lhs = [lhs, rhs](const Vec2& x) { return lhs(x) - rhs(x); };
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        Expr rhs = unary();
        lhs = [lhs, rhs](const Vec2& x) { return lhs(x) * rhs(x); };
      } else if (accept('/')) {
        Expr rhs = unary();
        lhs = [lhs, rhs](const Vec2& x) { return lhs(x) / rhs(x); };
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) {
      Expr e = unary();
      return [e](const Vec2& x) { return -e(x); };
    }
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      Expr ex = unary();
      return [base, ex](const Vec2& x) { return std::pow(base(x), ex(x)); };
    }
    return base;
  }

  Expr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (!accept(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    const std::string rest(src_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("bad number");
    }
    pos_ += used;
    return [v](const Vec2&) { return v; };
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string name(src_.substr(start, pos_ - start));
    if (name == "x") return [](const Vec2& x) { return x[0]; };
    if (name == "y") return [](const Vec2& x) { return x[1]; };
    if (name == "r") return [](const Vec2& x) { return std::hypot(x[0], x[1]); };
    if (name == "pi") return [](const Vec2&) { return std::numbers::pi; };
    if (name == "const") return unary();

    using Fn = double (*)(double);
    Fn fn = nullptr;
    if (name == "sin") fn = [](double t) { return std::sin(t); };
    else if (name == "cos") fn = [](double t) { return std::cos(t); };
    else if (name == "exp") fn = [](double t) { return std::exp(t); };
    else if (name == "sqrt") fn = [](double t) { return std::sqrt(t); };
    else if (name == "abs") fn = [](double t) { return std::abs(t); };
    else if (name == "log") fn = [](double t) { return std::log(t); };
    else if (name == "tanh") fn = [](double t) { return std::tanh(t); };
    else if (name == "sinpi") fn = [](double t) { return std::sin(std::numbers::pi * t); };
    else if (name == "cospi") fn = [](double t) { return std::cos(std::numbers::pi * t); };
    if (fn == nullptr) fail("unknown identifier '" + name + "'");
    Expr arg = power();
    return [fn, arg](const Vec2& x) { return fn(arg(x)); };
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Compiles a catalog expression; throws UnknownExpression on bad input.
inline Expr parse_expr(std::string_view src) { return detail::ExprParser(src).parse(); }

/// Evaluates a catalog expression at every active node of the grid.
inline ScalarField eval_expr(std::string_view src, const GridPtr& grid) {
  const Expr e = parse_expr(src);
  return sample(grid, e);
}

}  // namespace pqfrac
