#include "kdual/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace kdual {

enum class Fn { sin, cos, exp, log, sqrt, abs, max, min, pow, sign, step };

struct ExprNode {
  enum class Kind { num, var, neg, add, sub, mul, div, pow, call };
  Kind kind;
  double value = 0.0;
  Var var = Var::x;
  Fn fn = Fn::sin;
  std::vector<std::shared_ptr<const ExprNode>> kids;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;
using Kind = ExprNode::Kind;

NodePtr make_num(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::num;
  n->value = v;
  return n;
}

NodePtr make_var(Var v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::var;
  n->var = v;
  return n;
}

bool is_num(const NodePtr& n, double v) {
  return n->kind == Kind::num && n->value == v;
}

NodePtr make_bin(Kind k, NodePtr a, NodePtr b) {
  // Light constant folding; enough to keep symbolic derivatives readable.
  if (a->kind == Kind::num && b->kind == Kind::num) {
    switch (k) {
      case Kind::add: return make_num(a->value + b->value);
      case Kind::sub: return make_num(a->value - b->value);
      case Kind::mul: return make_num(a->value * b->value);
      default: break;  // fold / and ^ at eval time to keep domain errors visible
    }
  }
  if (k == Kind::add) {
    if (is_num(a, 0.0)) return b;
    if (is_num(b, 0.0)) return a;
  }
  if (k == Kind::sub && is_num(b, 0.0)) return a;
  if (k == Kind::mul) {
    if (is_num(a, 0.0) || is_num(b, 0.0)) return make_num(0.0);
    if (is_num(a, 1.0)) return b;
    if (is_num(b, 1.0)) return a;
  }
  if (k == Kind::pow && is_num(b, 1.0)) return a;
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->kids = {std::move(a), std::move(b)};
  return n;
}

NodePtr make_neg(NodePtr a) {
  if (a->kind == Kind::num) return make_num(-a->value);
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::neg;
  n->kids = {std::move(a)};
  return n;
}

NodePtr make_call(Fn fn, std::vector<NodePtr> args) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::call;
  n->fn = fn;
  n->kids = std::move(args);
  return n;
}

struct FnInfo {
  const char* name;
  Fn fn;
  std::size_t arity;
};

constexpr FnInfo kFns[] = {
    {"sin", Fn::sin, 1},   {"cos", Fn::cos, 1},   {"exp", Fn::exp, 1},
    {"log", Fn::log, 1},   {"sqrt", Fn::sqrt, 1}, {"abs", Fn::abs, 1},
    {"max", Fn::max, 2},   {"min", Fn::min, 2},   {"pow", Fn::pow, 2},
    {"sign", Fn::sign, 1}, {"step", Fn::step, 1},
};

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr run() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(pos_, "unexpected trailing input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr parse_sum() {
    NodePtr e = parse_product();
    for (;;) {
      if (eat('+')) e = make_bin(Kind::add, e, parse_product());
      else if (eat('-')) e = make_bin(Kind::sub, e, parse_product());
      else return e;
    }
  }

  NodePtr parse_product() {
    NodePtr e = parse_unary();
    for (;;) {
      if (eat('*')) e = make_bin(Kind::mul, e, parse_unary());
      else if (eat('/')) e = make_bin(Kind::div, e, parse_unary());
      else return e;
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return make_neg(parse_unary());
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (eat('^')) return make_bin(Kind::pow, base, parse_unary());  // right assoc
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError(pos_, "unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      if (!eat(')')) throw ParseError(pos_, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError(start, "bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    if (!std::isfinite(v)) throw ParseError(start, "number out of range");
    return make_num(v);
  }

  NodePtr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (name == "x") return make_var(Var::x);
    if (name == "y") return make_var(Var::y);
    if (name == "z") return make_var(Var::z);
    if (name == "t") return make_var(Var::t);
    if (name == "pi") return make_num(M_PI);
    if (name == "e") return make_num(M_E);
    for (const FnInfo& fi : kFns) {
      if (name == fi.name) {
        if (!eat('(')) throw ParseError(pos_, "expected '(' after function name");
        std::vector<NodePtr> args;
        args.push_back(parse_sum());
        while (eat(',')) args.push_back(parse_sum());
        if (!eat(')')) throw ParseError(pos_, "expected ')' in call");
        if (args.size() != fi.arity)
          throw ParseError(start, std::string(fi.name) + " expects " +
                                      std::to_string(fi.arity) + " argument(s)");
        return make_call(fi.fn, std::move(args));
      }
    }
    throw ParseError(start, "unknown identifier '" + name + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval_node(const ExprNode& n, const Bindings& b) {
  switch (n.kind) {
    case Kind::num:
      return n.value;
    case Kind::var: {
      const auto& slot = b.v[static_cast<std::size_t>(n.var)];
      if (!slot) throw EvalError("unbound variable");
      return *slot;
    }
    case Kind::neg:
      return -eval_node(*n.kids[0], b);
    case Kind::add:
      return eval_node(*n.kids[0], b) + eval_node(*n.kids[1], b);
    case Kind::sub:
      return eval_node(*n.kids[0], b) - eval_node(*n.kids[1], b);
    case Kind::mul:
      return eval_node(*n.kids[0], b) * eval_node(*n.kids[1], b);
    case Kind::div: {
      double num = eval_node(*n.kids[0], b);
      double den = eval_node(*n.kids[1], b);
      if (den == 0.0) throw EvalError("division by zero");
      return num / den;
    }
    case Kind::pow: {
      double base = eval_node(*n.kids[0], b);
      double ex = eval_node(*n.kids[1], b);
      double r = std::pow(base, ex);
      if (!std::isfinite(r)) throw EvalError("pow out of domain or overflow");
      return r;
    }
    case Kind::call: {
      double a = eval_node(*n.kids[0], b);
      switch (n.fn) {
        case Fn::sin: return std::sin(a);
        case Fn::cos: return std::cos(a);
        case Fn::exp: {
          double r = std::exp(a);
          if (!std::isfinite(r)) throw EvalError("exp overflow");
          return r;
        }
        case Fn::log:
          if (a <= 0.0) throw EvalError("log of non-positive argument");
          return std::log(a);
        case Fn::sqrt:
          if (a < 0.0) throw EvalError("sqrt of negative argument");
          return std::sqrt(a);
        case Fn::abs: return std::fabs(a);
        case Fn::sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
        case Fn::step: return a >= 0.0 ? 1.0 : 0.0;
        case Fn::max: {
          double c = eval_node(*n.kids[1], b);
          return a >= c ? a : c;
        }
        case Fn::min: {
          double c = eval_node(*n.kids[1], b);
          return a <= c ? a : c;
        }
        case Fn::pow: {
          double c = eval_node(*n.kids[1], b);
          double r = std::pow(a, c);
          if (!std::isfinite(r)) throw EvalError("pow out of domain or overflow");
          return r;
        }
      }
      throw EvalError("bad call node");
    }
  }
  throw EvalError("bad expression node");
}

NodePtr diff_node(const NodePtr& n, Var v);

NodePtr diff_pow(const NodePtr& base, const NodePtr& ex, Var v) {
  if (ex->kind == Kind::num) {
    // d a^c = c * a^(c-1) * a'
    return make_bin(Kind::mul,
                    make_bin(Kind::mul, make_num(ex->value),
                             make_bin(Kind::pow, base, make_num(ex->value - 1.0))),
                    diff_node(base, v));
  }
  // d a^b = a^b * (b' * log(a) + b * a' / a)
  NodePtr whole = make_bin(Kind::pow, base, ex);
  NodePtr term1 = make_bin(Kind::mul, diff_node(ex, v), make_call(Fn::log, {base}));
  NodePtr term2 = make_bin(Kind::div, make_bin(Kind::mul, ex, diff_node(base, v)), base);
  return make_bin(Kind::mul, whole, make_bin(Kind::add, term1, term2));
}

NodePtr diff_node(const NodePtr& n, Var v) {
  switch (n->kind) {
    case Kind::num:
      return make_num(0.0);
    case Kind::var:
      return make_num(n->var == v ? 1.0 : 0.0);
    case Kind::neg:
      return make_neg(diff_node(n->kids[0], v));
    case Kind::add:
      return make_bin(Kind::add, diff_node(n->kids[0], v), diff_node(n->kids[1], v));
    case Kind::sub:
      return make_bin(Kind::sub, diff_node(n->kids[0], v), diff_node(n->kids[1], v));
    case Kind::mul:
      return make_bin(Kind::add,
                      make_bin(Kind::mul, diff_node(n->kids[0], v), n->kids[1]),
                      make_bin(Kind::mul, n->kids[0], diff_node(n->kids[1], v)));
    case Kind::div:
      return make_bin(
          Kind::div,
          make_bin(Kind::sub,
                   make_bin(Kind::mul, diff_node(n->kids[0], v), n->kids[1]),
                   make_bin(Kind::mul, n->kids[0], diff_node(n->kids[1], v))),
          make_bin(Kind::pow, n->kids[1], make_num(2.0)));
    case Kind::pow:
      return diff_pow(n->kids[0], n->kids[1], v);
    case Kind::call: {
      const NodePtr& a = n->kids[0];
      NodePtr da = diff_node(a, v);
      switch (n->fn) {
        case Fn::sin:
          return make_bin(Kind::mul, make_call(Fn::cos, {a}), da);
        case Fn::cos:
          return make_neg(make_bin(Kind::mul, make_call(Fn::sin, {a}), da));
        case Fn::exp:
          return make_bin(Kind::mul, make_call(Fn::exp, {a}), da);
        case Fn::log:
          return make_bin(Kind::div, da, a);
        case Fn::sqrt:
          return make_bin(Kind::div, da,
                          make_bin(Kind::mul, make_num(2.0), make_call(Fn::sqrt, {a})));
        case Fn::abs:
          // Subgradient convention: derivative of abs at 0 is 0.
          return make_bin(Kind::mul, make_call(Fn::sign, {a}), da);
        case Fn::sign:
        case Fn::step:
          return make_num(0.0);  // flat away from the jump; convention at it
        case Fn::max: {
          // First argument wins ties: step(a-b) selects a when a >= b.
          const NodePtr& c = n->kids[1];
          NodePtr sel = make_call(Fn::step, {make_bin(Kind::sub, a, c)});
          return make_bin(Kind::add, make_bin(Kind::mul, sel, da),
                          make_bin(Kind::mul,
                                   make_bin(Kind::sub, make_num(1.0), sel),
                                   diff_node(c, v)));
        }
        case Fn::min: {
          const NodePtr& c = n->kids[1];
          NodePtr sel = make_call(Fn::step, {make_bin(Kind::sub, c, a)});
          return make_bin(Kind::add, make_bin(Kind::mul, sel, da),
                          make_bin(Kind::mul,
                                   make_bin(Kind::sub, make_num(1.0), sel),
                                   diff_node(c, v)));
        }
        case Fn::pow:
          return diff_pow(n->kids[0], n->kids[1], v);
      }
      return make_num(0.0);
    }
  }
  return make_num(0.0);
}

bool depends_node(const ExprNode& n, Var v) {
  if (n.kind == Kind::var) return n.var == v;
  for (const auto& k : n.kids)
    if (depends_node(*k, v)) return true;
  return false;
}

void serialize_node(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case Kind::num: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", n.value);
      out += buf;
      return;
    }
    case Kind::var: {
      static const char* names[] = {"x", "y", "z", "t"};
      out += names[static_cast<std::size_t>(n.var)];
      return;
    }
    case Kind::neg:
      out += "(-";
      serialize_node(*n.kids[0], out);
      out += ')';
      return;
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div:
    case Kind::pow: {
      static const char ops[] = {'+', '-', '*', '/', '^'};
      out += '(';
      serialize_node(*n.kids[0], out);
      out += ops[static_cast<int>(n.kind) - static_cast<int>(Kind::add)];
      serialize_node(*n.kids[1], out);
      out += ')';
      return;
    }
    case Kind::call: {
      for (const FnInfo& fi : kFns)
        if (fi.fn == n.fn) {
          out += fi.name;
          break;
        }
      out += '(';
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += ',';
        serialize_node(*n.kids[i], out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace

struct ExprOps {
  static Expr wrap(NodePtr n) { return Expr(std::move(n)); }
  static const NodePtr& node(const Expr& e) { return e.root_; }
};

Expr Expr::parse(const std::string& text) {
  return ExprOps::wrap(Parser(text).run());
}

Expr Expr::constant(double v) { return ExprOps::wrap(make_num(v)); }

Expr Expr::variable(Var v) { return ExprOps::wrap(make_var(v)); }

double Expr::eval(const Bindings& b) const {
  if (!root_) throw EvalError("empty expression");
  double r = eval_node(*root_, b);
  if (!std::isfinite(r)) throw EvalError("non-finite result");
  return r;
}

Expr Expr::differentiate(Var var) const {
  if (!root_) throw EvalError("empty expression");
  return ExprOps::wrap(diff_node(root_, var));
}

bool Expr::depends_on(Var var) const {
  return root_ && depends_node(*root_, var);
}

std::string Expr::serialize() const {
  if (!root_) return "";
  std::string out;
  serialize_node(*root_, out);
  return out;
}

Expr operator+(const Expr& a, const Expr& b) {
  return ExprOps::wrap(make_bin(Kind::add, ExprOps::node(a), ExprOps::node(b)));
}
Expr operator-(const Expr& a, const Expr& b) {
  return ExprOps::wrap(make_bin(Kind::sub, ExprOps::node(a), ExprOps::node(b)));
}
Expr operator*(const Expr& a, const Expr& b) {
  return ExprOps::wrap(make_bin(Kind::mul, ExprOps::node(a), ExprOps::node(b)));
}
Expr operator-(const Expr& a) { return ExprOps::wrap(make_neg(ExprOps::node(a))); }

}  // namespace kdual
