#include "driftlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

namespace driftlab {

enum class Op {
  Const, Var, Add, Sub, Mul, Div, Neg,
  Sin, Cos, Exp, Abs, Min, Max, IfPos,
};

struct Expr::Node {
  Op op;
  double value = 0.0;  // Const
  int var = 0;         // Var
  std::shared_ptr<const Node> a, b, c;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, NodePtr c = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->c = std::move(c);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_var(int i) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Var;
  n->var = i;
  return n;
}

double eval_node(const Expr::Node* n, const std::array<double, 3>& x, double s) {
  switch (n->op) {
    case Op::Const: return n->value;
    case Op::Var: return n->var == 3 ? s : x[n->var];
    case Op::Add: return eval_node(n->a.get(), x, s) + eval_node(n->b.get(), x, s);
    case Op::Sub: return eval_node(n->a.get(), x, s) - eval_node(n->b.get(), x, s);
    case Op::Mul: return eval_node(n->a.get(), x, s) * eval_node(n->b.get(), x, s);
    case Op::Div: return eval_node(n->a.get(), x, s) / eval_node(n->b.get(), x, s);
    case Op::Neg: return -eval_node(n->a.get(), x, s);
    case Op::Sin: return std::sin(eval_node(n->a.get(), x, s));
    case Op::Cos: return std::cos(eval_node(n->a.get(), x, s));
    case Op::Exp: return std::exp(eval_node(n->a.get(), x, s));
    case Op::Abs: return std::abs(eval_node(n->a.get(), x, s));
    case Op::Min: return std::min(eval_node(n->a.get(), x, s), eval_node(n->b.get(), x, s));
    case Op::Max: return std::max(eval_node(n->a.get(), x, s), eval_node(n->b.get(), x, s));
    case Op::IfPos:
      return eval_node(n->a.get(), x, s) > 0.0 ? eval_node(n->b.get(), x, s)
                                               : eval_node(n->c.get(), x, s);
  }
  return 0.0;
}

bool is_const(const NodePtr& n, double v) {
  return n->op == Op::Const && n->value == v;
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value + b->value);
  return make(Op::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value - b->value);
  return make(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value * b->value);
  return make(Op::Mul, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
  if (a->op == Op::Const) return make_const(-a->value);
  return make(Op::Neg, std::move(a));
}

NodePtr diff_node(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Var: return make_const(n->var == var ? 1.0 : 0.0);
    case Op::Add: return add(diff_node(n->a, var), diff_node(n->b, var));
    case Op::Sub: return sub(diff_node(n->a, var), diff_node(n->b, var));
    case Op::Mul:
      return add(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var)));
    case Op::Div: {
      auto num = sub(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var)));
      return make(Op::Div, std::move(num), mul(n->b, n->b));
    }
    case Op::Neg: return neg(diff_node(n->a, var));
    case Op::Sin: return mul(make(Op::Cos, n->a), diff_node(n->a, var));
    case Op::Cos: return neg(mul(make(Op::Sin, n->a), diff_node(n->a, var)));
    case Op::Exp: return mul(make(Op::Exp, n->a), diff_node(n->a, var));
    case Op::Abs:  // sign(a) * a', a.e.
      return make(Op::IfPos, n->a, diff_node(n->a, var), neg(diff_node(n->a, var)));
    case Op::Min:
      return make(Op::IfPos, sub(n->b, n->a), diff_node(n->a, var), diff_node(n->b, var));
    case Op::Max:
      return make(Op::IfPos, sub(n->a, n->b), diff_node(n->a, var), diff_node(n->b, var));
    case Op::IfPos:
      return make(Op::IfPos, n->a, diff_node(n->b, var), diff_node(n->c, var));
  }
  return nullptr;
}

bool kinky(const Expr::Node* n) {
  if (!n) return false;
  if (n->op == Op::Abs || n->op == Op::Min || n->op == Op::Max || n->op == Op::IfPos)
    return true;
  return kinky(n->a.get()) || kinky(n->b.get()) || kinky(n->c.get());
}

void print_node(const Expr::Node* n, std::ostream& os) {
  auto bin = [&](const char* sym) {
    os << '(';
    print_node(n->a.get(), os);
    os << sym;
    print_node(n->b.get(), os);
    os << ')';
  };
  auto fn = [&](const char* name) {
    os << name << '(';
    print_node(n->a.get(), os);
    if (n->b) {
      os << ',';
      print_node(n->b.get(), os);
    }
    if (n->c) {
      os << ',';
      print_node(n->c.get(), os);
    }
    os << ')';
  };
  switch (n->op) {
    case Op::Const: os << n->value; break;
    case Op::Var: os << (n->var == 3 ? std::string("s") : "x" + std::to_string(n->var + 1)); break;
    case Op::Add: bin("+"); break;
    case Op::Sub: bin("-"); break;
    case Op::Mul: bin("*"); break;
    case Op::Div: bin("/"); break;
    case Op::Neg:
      os << "(-";
      print_node(n->a.get(), os);
      os << ')';
      break;
    case Op::Sin: fn("sin"); break;
    case Op::Cos: fn("cos"); break;
    case Op::Exp: fn("exp"); break;
    case Op::Abs: fn("abs"); break;
    case Op::Min: fn("min"); break;
    case Op::Max: fn("max"); break;
    case Op::IfPos: fn("ifpos"); break;
  }
}

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ExprError("expression parse error at offset " + std::to_string(pos) + ": " + msg +
                    " in '" + text + "'");
  }

  NodePtr parse_expr() {
    NodePtr n = parse_term();
    for (;;) {
      if (eat('+'))
        n = make(Op::Add, n, parse_term());
      else if (eat('-'))
        n = make(Op::Sub, n, parse_term());
      else
        return n;
    }
  }

  NodePtr parse_term() {
    NodePtr n = parse_factor();
    for (;;) {
      if (eat('*'))
        n = make(Op::Mul, n, parse_factor());
      else if (eat('/'))
        n = make(Op::Div, n, parse_factor());
      else
        return n;
    }
  }

  NodePtr parse_factor() {
    if (eat('-')) return make(Op::Neg, parse_factor());
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    const char ch = text[pos];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t used = 0;
      double v = std::stod(text.substr(pos), &used);
      pos += used;
      return make_const(v);
    }
    if (ch == '(') {
      ++pos;
      NodePtr n = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
      std::string name = text.substr(start, pos - start);
      if (name == "x1") return make_var(0);
      if (name == "x2") return make_var(1);
      if (name == "x3") return make_var(2);
      if (name == "s") return make_var(3);
      if (name == "pi") return make_const(M_PI);
      if (!eat('(')) fail("expected '(' after function name '" + name + "'");
      std::vector<NodePtr> args;
      args.push_back(parse_expr());
      while (eat(',')) args.push_back(parse_expr());
      if (!eat(')')) fail("expected ')'");
      auto arity = [&](std::size_t k) {
        if (args.size() != k)
          fail("function '" + name + "' expects " + std::to_string(k) + " argument(s)");
      };
      if (name == "sin") { arity(1); return make(Op::Sin, args[0]); }
      if (name == "cos") { arity(1); return make(Op::Cos, args[0]); }
      if (name == "exp") { arity(1); return make(Op::Exp, args[0]); }
      if (name == "abs") { arity(1); return make(Op::Abs, args[0]); }
      if (name == "min") { arity(2); return make(Op::Min, args[0], args[1]); }
      if (name == "max") { arity(2); return make(Op::Max, args[0], args[1]); }
      if (name == "ifpos") { arity(3); return make(Op::IfPos, args[0], args[1], args[2]); }
      fail("unknown function '" + name + "'");
    }
    fail("unexpected character");
  }
};

}  // namespace

double Expr::eval(const std::array<double, 3>& x, double s) const {
  if (!node_) throw ExprError("eval of empty expression");
  return eval_node(node_.get(), x, s);
}

Expr Expr::diff(int var) const {
  if (!node_) throw ExprError("diff of empty expression");
  return Expr(diff_node(node_, var));
}

bool Expr::has_kinks() const { return kinky(node_.get()); }

std::string Expr::str() const {
  if (!node_) return "<empty>";
  std::ostringstream os;
  os.precision(17);
  print_node(node_.get(), os);
  return os.str();
}

Expr Expr::constant(double c) { return Expr(make_const(c)); }
Expr Expr::var(int i) { return Expr(make_var(i)); }
Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(make(Op::Div, a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(neg(a.node_)); }
Expr Expr::sin(const Expr& a) { return Expr(make(Op::Sin, a.node_)); }
Expr Expr::cos(const Expr& a) { return Expr(make(Op::Cos, a.node_)); }
Expr Expr::exp(const Expr& a) { return Expr(make(Op::Exp, a.node_)); }
Expr Expr::abs(const Expr& a) { return Expr(make(Op::Abs, a.node_)); }
Expr Expr::min(const Expr& a, const Expr& b) { return Expr(make(Op::Min, a.node_, b.node_)); }
Expr Expr::max(const Expr& a, const Expr& b) { return Expr(make(Op::Max, a.node_, b.node_)); }
Expr Expr::ifpos(const Expr& c, const Expr& a, const Expr& b) {
  return Expr(make(Op::IfPos, c.node_, a.node_, b.node_));
}

Expr parse_expr(const std::string& text) {
  Parser p{text};
  NodePtr n = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters");
  return Expr(std::move(n));
}

}  // namespace driftlab
