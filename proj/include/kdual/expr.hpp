#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>

#include "kdual/errors.hpp"

namespace kdual {

// Variables allowed in coefficient expressions, in binding order.
enum class Var { x = 0, y = 1, z = 2, t = 3 };

struct Bindings {
  std::array<std::optional<double>, 4> v;

  Bindings() = default;
  Bindings& set(Var var, double value) {
    v[static_cast<std::size_t>(var)] = value;
    return *this;
  }
  static Bindings at_x(double x) { return Bindings().set(Var::x, x); }
};

struct ExprNode;

// Immutable arithmetic expression over variables x, y, z, t.
// Shareable across threads after construction.
class Expr {
 public:
  Expr() = default;

  static Expr parse(const std::string& text);
  static Expr constant(double v);
  static Expr variable(Var v);

  bool empty() const { return root_ == nullptr; }

  double eval(const Bindings& b) const;
  double operator()(double x) const { return eval(Bindings::at_x(x)); }

  // Symbolic derivative. Total on the supported function set: the derivative
  // of abs at 0 is 0, max/min pick their first argument on ties.
  Expr differentiate(Var var) const;

  bool depends_on(Var var) const;

  std::string serialize() const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}
  std::shared_ptr<const ExprNode> root_;
  friend struct ExprOps;
};

// Expression algebra used when building dual coefficients symbolically.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

}  // namespace kdual
