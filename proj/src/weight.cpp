#include "sbwave/weight.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sbwave {

WeightFunction::WeightFunction(Fn fn, std::string description)
    : fn_(std::move(fn)), description_(std::move(description)) {
  if (!fn_) throw std::invalid_argument("weight function must be callable");
}

WeightFunction WeightFunction::constant(double c) {
  std::ostringstream text;
  text.precision(17);
  text << c;
  return WeightFunction([c](double) { return c; }, text.str());
}

WeightFunction WeightFunction::from_expression(std::string_view spec) {
  std::shared_ptr<const WeightExpr> tree = parse_weight_expr(spec);
  return WeightFunction([tree](double y) { return tree->evaluate(y); }, std::string(spec));
}

std::vector<double> WeightFunction::evaluate_positive(std::span<const double> sample) const {
  std::vector<double> out;
  out.reserve(sample.size());
  for (double y : sample) {
    const double w = fn_(y);
    if (!(w > 0.0) || !std::isfinite(w)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "weight '" << description_ << "' is not positive and finite at y = " << y << " (w = " << w
          << ")";
      throw std::domain_error(msg.str());
    }
    out.push_back(w);
  }
  return out;
}

}  // namespace sbwave
