#include "sbwave/warp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sbwave {
namespace {

constexpr double kTieJitter = 1e-12;

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::out_of_range(std::string(what) + " must lie in [0,1], got " + std::to_string(v));
}

// Linear interpolation on a nondecreasing polyline; returns the left-most
// abscissa on flat pieces so inverse(1) lands on the last knot.
double polyline(const std::vector<double>& from, const std::vector<double>& to, double v) {
  if (v <= from.front()) return to.front();
  if (v >= from.back()) {
    auto first = std::lower_bound(from.begin(), from.end(), from.back());
    return to[static_cast<std::size_t>(first - from.begin())];
  }
  const auto it = std::upper_bound(from.begin(), from.end(), v);
  const std::size_t hi = static_cast<std::size_t>(it - from.begin());
  const std::size_t lo = hi - 1;
  const double span = from[hi] - from[lo];
  if (span <= 0.0) return to[lo];
  const double t = (v - from[lo]) / span;
  return to[lo] + t * (to[hi] - to[lo]);
}

}  // namespace

std::string to_string(WarpKind kind) {
  switch (kind) {
    case WarpKind::identity: return "identity";
    case WarpKind::empirical: return "empirical";
    case WarpKind::parametric: return "parametric";
  }
  return "unknown";
}

WarpKind parse_warp_kind(const std::string& text) {
  if (text == "identity") return WarpKind::identity;
  if (text == "empirical") return WarpKind::empirical;
  if (text == "parametric") return WarpKind::parametric;
  throw std::invalid_argument("unknown warp kind '" + text + "'");
}

WarpFunction WarpFunction::identity() { return WarpFunction{}; }

WarpFunction WarpFunction::empirical(std::span<const double> sample) {
  if (sample.size() < 2)
    throw std::invalid_argument("empirical warp needs at least two observations");
  std::vector<double> knots(sample.begin(), sample.end());
  for (double v : knots) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("empirical warp sample values must lie in [0,1]");
  }
  std::sort(knots.begin(), knots.end());
  if (knots.front() <= 0.0) knots.front() = kTieJitter;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i] <= knots[i - 1]) knots[i] = knots[i - 1] + kTieJitter;
  }
  return from_knots(std::move(knots));
}

WarpFunction WarpFunction::from_knots(std::vector<double> knots) {
  if (knots.size() < 2) throw std::invalid_argument("empirical warp needs at least two knots");
  if (!std::is_sorted(knots.begin(), knots.end()) ||
      std::adjacent_find(knots.begin(), knots.end()) != knots.end())
    throw std::invalid_argument("empirical warp knots must be strictly increasing");
  if (knots.front() <= 0.0) throw std::invalid_argument("empirical warp knots must be positive");

  WarpFunction warp;
  warp.kind_ = WarpKind::empirical;
  warp.name_ = "empirical";
  const double n = static_cast<double>(knots.size());
  warp.xs_.reserve(knots.size() + 2);
  warp.us_.reserve(knots.size() + 2);
  warp.xs_.push_back(0.0);
  warp.us_.push_back(0.0);
  for (std::size_t k = 0; k < knots.size(); ++k) {
    warp.xs_.push_back(knots[k]);
    warp.us_.push_back(static_cast<double>(k + 1) / n);
  }
  if (knots.back() < 1.0) {
    warp.xs_.push_back(1.0);
    warp.us_.push_back(1.0);
  }
  warp.knots_ = std::move(knots);
  return warp;
}

WarpFunction WarpFunction::parametric(std::string name, Map cdf, Map density, Map inverse) {
  if (!cdf || !density) throw std::invalid_argument("parametric warp needs cdf and density");
  WarpFunction warp;
  warp.kind_ = WarpKind::parametric;
  warp.name_ = std::move(name);
  warp.cdf_ = std::move(cdf);
  warp.density_ = std::move(density);
  warp.inverse_ = std::move(inverse);
  return warp;
}

double WarpFunction::cdf(double x) const {
  switch (kind_) {
    case WarpKind::identity: return x;
    case WarpKind::empirical: return polyline(xs_, us_, x);
    case WarpKind::parametric: return cdf_(x);
  }
  return x;
}

double WarpFunction::density(double x) const {
  switch (kind_) {
    case WarpKind::identity: return 1.0;
    case WarpKind::parametric: return density_(x);
    case WarpKind::empirical: {
      if (x < 0.0 || x > 1.0) return 0.0;
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
      if (hi >= xs_.size()) hi = xs_.size() - 1;
      if (hi == 0) hi = 1;
      const std::size_t lo = hi - 1;
      return (us_[hi] - us_[lo]) / (xs_[hi] - xs_[lo]);
    }
  }
  return 1.0;
}

double WarpFunction::inverse(double u) const {
  switch (kind_) {
    case WarpKind::identity: return u;
    case WarpKind::empirical: return polyline(us_, xs_, u);
    case WarpKind::parametric: {
      if (inverse_) return inverse_(u);
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf_(mid) < u) lo = mid; else hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return u;
}

DensityBoundsReport WarpFunction::check_density_bounds(std::size_t grid_points, double floor) const {
  if (grid_points < 2) throw std::invalid_argument("density check needs at least two grid points");
  DensityBoundsReport report;
  report.min_density = std::numeric_limits<double>::infinity();
  report.max_density = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double h = density(x);
    report.min_density = std::min(report.min_density, h);
    report.max_density = std::max(report.max_density, h);
    if (!(h > floor)) ++report.zero_points;
  }
  return report;
}

double warp_point(const WarpFunction& warp, double x) {
  check_unit(x, "warp argument");
  return warp.cdf(x);
}

double unwarp_point(const WarpFunction& warp, double u) {
  check_unit(u, "unwarp argument");
  return warp.inverse(u);
}

}  // namespace sbwave
