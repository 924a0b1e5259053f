#pragma once

#include <string>

#include "sbwave/biased_estimator.hpp"

namespace sbwave {

inline constexpr int kEstimateFormatVersion = 1;

/// Versioned JSON document holding everything needed to re-evaluate an
/// estimate: config, transform, warp knots, coefficients and diagnostics.
/// Parametric warps cannot be serialized (std::invalid_argument).
std::string estimate_to_json(const PowerDensityEstimate& estimate, int indent = 2);

/// Inverse of estimate_to_json. The auxiliary density is not stored, so the
/// reloaded estimate has aux() == nullptr. Throws std::invalid_argument on a
/// malformed document or an unsupported version.
PowerDensityEstimate estimate_from_json(const std::string& text);

}  // namespace sbwave
