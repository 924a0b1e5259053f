#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sbwave {

/// Syntax error in a weight specification; offset is a byte index into the
/// source text.
class WeightSyntaxError : public std::invalid_argument {
 public:
  WeightSyntaxError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Arithmetic failure while evaluating a weight (division by zero, zero to a
/// negative power) at a specific x.
class WeightEvalError : public std::domain_error {
 public:
  WeightEvalError(const std::string& message, double x);
  double x() const { return x_; }

 private:
  double x_;
};

/// Expression tree for a biasing function of one variable.
///
/// Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := atom ('^' signed-number)?
///   atom   := number | 'x' | family | '(' expr ')'
///   family := 'identity' | name '(' signed-number (',' signed-number)* ')'
/// with families linear(c0,c1) = c0 + c1 x, quad(c0,c2) = c0 + c2 x^2,
/// betainv(b1,b2) = x^-b1 (1-x)^-b2, identity = x.
struct WeightExpr {
  enum class Kind { number, variable, add, subtract, multiply, divide, power, family };

  Kind kind = Kind::number;
  double value = 0.0;            // number literal, or exponent for power
  std::string family;            // family name
  std::vector<double> args;      // family parameters
  std::unique_ptr<WeightExpr> lhs;
  std::unique_ptr<WeightExpr> rhs;

  double evaluate(double x) const;
  bool operator==(const WeightExpr& other) const;
};

/// Parses `text`; throws WeightSyntaxError.
std::unique_ptr<WeightExpr> parse_weight_expr(std::string_view text);

/// Canonical text that parses back to an identical tree.
std::string print_weight_expr(const WeightExpr& expr);

}  // namespace sbwave
