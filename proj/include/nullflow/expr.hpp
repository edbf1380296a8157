#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nullflow/field.hpp"
#include "nullflow/grid.hpp"

namespace nullflow {

/// A parsed arithmetic expression in the angles (theta, phi).
///
/// Grammar: sums of products of factors, where a factor is a numeric literal
/// (optionally signed), `theta`, `phi`, `cos(expr)`, `sin(expr)`, or a
/// parenthesized expression. This is intentionally the smallest language that
/// writes every initial surface the scenarios need; there is no subtraction
/// operator (negate a literal instead) and no division.
class AngularExpr {
public:
  /// Parses the expression; FormatError with the offending position otherwise.
  static AngularExpr parse(const std::string& text);

  double eval(double theta, double phi) const;
  ScalarField evaluate(const SphereGrid& grid) const;

  const std::string& text() const { return text_; }

private:
  enum class Op { Number, Theta, Phi, Cos, Sin, Add, Mul };
  struct Node {
    Op op = Op::Number;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

  double eval_node(int idx, double theta, double phi) const;

  std::string text_;
  std::vector<Node> nodes_;
  int root_ = -1;

  friend class ExprParser;
};

}  // namespace nullflow
