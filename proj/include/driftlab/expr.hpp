#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>

namespace driftlab {

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed-form scalar expression in the coordinates x1..x3 and an extra
/// slot `s` (used for integrands G(x, s) evaluated along a state).
///
/// Grammar accepted by parse_expr:
///   expr    := term (('+'|'-') term)*
///   term    := factor (('*'|'/') factor)*
///   factor  := ('-')? primary
///   primary := number | 'x1' | 'x2' | 'x3' | 's' | 'pi'
///            | fn '(' expr (',' expr)* ')' | '(' expr ')'
///   fn      := sin | cos | exp | abs | min | max | ifpos
/// ifpos(c, a, b) is the piecewise-by-predicate form: a where c > 0, else b.
class Expr {
 public:
  Expr() = default;

  double eval(const std::array<double, 3>& x, double s = 0.0) const;
  /// Derivative with respect to var (0..2 for x1..x3, 3 for s), taken
  /// branchwise across abs/min/max/ifpos kinks (a.e. derivative).
  Expr diff(int var) const;
  std::string str() const;
  bool valid() const { return node_ != nullptr; }
  /// True if the expression contains abs/min/max/ifpos nodes.
  bool has_kinks() const;

  static Expr constant(double c);
  static Expr var(int i);  // 0..2 -> x1..x3, 3 -> s
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  static Expr sin(const Expr& a);
  static Expr cos(const Expr& a);
  static Expr exp(const Expr& a);
  static Expr abs(const Expr& a);
  static Expr min(const Expr& a, const Expr& b);
  static Expr max(const Expr& a, const Expr& b);
  static Expr ifpos(const Expr& c, const Expr& a, const Expr& b);

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  friend Expr parse_expr(const std::string&);
};

Expr parse_expr(const std::string& text);

}  // namespace driftlab
