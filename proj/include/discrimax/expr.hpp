#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace discrimax {

/// A mean function eta(x, theta) written in a small arithmetic language.
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-'|'+') factor | base ('^' factor)?
///   base   := number | 'x' | 'p'digit+ | func '(' expr ')' | '(' expr ')'
///   func   := exp | log | sqrt
///
/// Parameters are p1..pk and must be referenced without gaps; k is the arity.
/// '^' is right-associative and binds tighter than a leading sign, so -x^2 is -(x^2).
class MeanExpr {
 public:
  /// Throws ParseError (with byte offset and expected tokens) or ArityError.
  static MeanExpr parse(std::string_view source);

  double eval(double x, std::span<const double> theta) const;

  /// Number of parameters, i.e. the highest index referenced.
  int arity() const { return arity_; }
  bool uses_x() const { return uses_x_; }
  const std::string& source() const { return source_; }

  /// Fully parenthesised rendering that parses back to an identical tree.
  std::string to_string() const;

  /// Structural equality of the parsed trees (sources may differ).
  bool same_tree(const MeanExpr& other) const;

 private:
  enum class Op : std::uint8_t { Const, X, Param, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt };
  struct Node {
    Op op = Op::Const;
    int lhs = -1;
    int rhs = -1;
    double value = 0.0;
    int index = 0;  // zero-based parameter index
  };

  friend class ExprParser;

  double eval_node(int id, double x, const double* theta) const;
  void render(int id, std::string& out) const;
  bool same_node(int id, const MeanExpr& other, int other_id) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  int arity_ = 0;
  bool uses_x_ = false;
  std::string source_;
};

}  // namespace discrimax
