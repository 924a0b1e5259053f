#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sbwave/weight_expr.hpp"

namespace sbwave {

/// The known biasing function w of the size-biased model g = w f / mu.
class WeightFunction {
 public:
  using Fn = std::function<double(double)>;

  WeightFunction(Fn fn, std::string description);

  static WeightFunction constant(double c);
  /// Parses a weight specification (see WeightExpr for the grammar).
  static WeightFunction from_expression(std::string_view spec);

  double operator()(double y) const { return fn_(y); }
  const std::string& description() const { return description_; }

  /// w at every sample point; throws std::domain_error if any value is not a
  /// finite positive number.
  std::vector<double> evaluate_positive(std::span<const double> sample) const;

 private:
  Fn fn_;
  std::string description_;
};

}  // namespace sbwave
