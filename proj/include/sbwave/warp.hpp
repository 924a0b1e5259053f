#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sbwave {

enum class WarpKind { identity, empirical, parametric };

std::string to_string(WarpKind kind);
WarpKind parse_warp_kind(const std::string& text);

/// Summary of how far the warp density strays from the (0, inf) band.
struct DensityBoundsReport {
  double min_density = 0.0;
  double max_density = 0.0;
  std::size_t zero_points = 0;  // grid points with density <= floor
  bool bounded() const { return zero_points == 0 && std::isfinite(max_density); }
};

/// A continuous CDF H on [0,1] with density h and inverse H*, used to warp
/// the wavelet basis: atoms are evaluated at H(x) instead of x.
class WarpFunction {
 public:
  using Map = std::function<double(double)>;

  static WarpFunction identity();

  /// Piecewise linear CDF through (0,0), (y_(k), k/n), (1,1). Tied values are
  /// separated by a cumulative 1e-12 jitter so the knots are strictly
  /// increasing. Throws std::invalid_argument for n < 2 or values outside
  /// [0,1].
  static WarpFunction empirical(std::span<const double> sample);

  /// Rebuilds an empirical warp from stored knots (values k/n implied).
  static WarpFunction from_knots(std::vector<double> knots);

  /// User supplied CDF. When `inverse` is empty it is computed by bisection.
  static WarpFunction parametric(std::string name, Map cdf, Map density, Map inverse = {});

  WarpKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double cdf(double x) const;
  double density(double x) const;
  double inverse(double u) const;

  /// Sorted, jittered knots of an empirical warp; empty otherwise.
  const std::vector<double>& knots() const { return knots_; }

  /// Scans `grid_points` equally spaced points of [0,1] and reports density
  /// values that violate the bounded-away-from-zero-and-infinity condition.
  DensityBoundsReport check_density_bounds(std::size_t grid_points = 1001,
                                           double floor = 0.0) const;

 private:
  WarpKind kind_ = WarpKind::identity;
  std::string name_ = "identity";
  // Empirical: polyline through (xs_[i], us_[i]).
  std::vector<double> knots_;
  std::vector<double> xs_;
  std::vector<double> us_;
  Map cdf_;
  Map density_;
  Map inverse_;
};

/// H(x) for x in [0,1]; std::out_of_range otherwise.
double warp_point(const WarpFunction& warp, double x);
/// H*(u) for u in [0,1]; std::out_of_range otherwise.
double unwarp_point(const WarpFunction& warp, double u);

}  // namespace sbwave
