#include "sbwave/biased_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sbwave {
namespace {

double median(std::vector<double> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void check_sample(std::span<const double> sample, std::size_t min_size) {
  if (sample.size() < min_size) {
    throw std::invalid_argument(sample.empty() ? "no observations"
                                               : "too few observations: need at least " +
                                                     std::to_string(min_size));
  }
  for (double y : sample)
    if (!std::isfinite(y)) throw std::invalid_argument("observations must be finite");
}

bool is_even_integer(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-12 && std::fmod(r, 2.0) == 0.0;
}

DetailCoefficients empty_details(int j0, int j1) {
  DetailCoefficients d;
  for (int j = j0; j < j1; ++j) d.emplace_back(std::size_t{1} << j, 0.0);
  return d;
}

void accumulate(const WaveletBasis& basis, const SampleTerms& terms, int j0, int j1,
                std::vector<double>& c, DetailCoefficients& d) {
  c.assign(std::size_t{1} << j0, 0.0);
  d = empty_details(j0, j1);
  for (std::size_t i = 0; i < terms.positions.size(); ++i)
    basis.accumulate_atoms(terms.positions[i], j0, j1, terms.factors[i], c, d);
}

}  // namespace

std::string to_string(ThresholdMode mode) {
  switch (mode) {
    case ThresholdMode::hard: return "hard";
    case ThresholdMode::soft: return "soft";
    case ThresholdMode::none: return "none";
  }
  return "unknown";
}

std::string to_string(AuxKind kind) {
  switch (kind) {
    case AuxKind::kde_sj: return "kde_sj";
    case AuxKind::wavelet: return "wavelet";
    case AuxKind::none: return "none";
  }
  return "unknown";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::m1: return "m1";
    case Method::m2: return "m2";
    case Method::m3: return "m3";
    case Method::m4: return "m4";
  }
  return "unknown";
}

ThresholdMode parse_threshold_mode(const std::string& text) {
  if (text == "hard" || text == "hard_universal") return ThresholdMode::hard;
  if (text == "soft" || text == "soft_universal") return ThresholdMode::soft;
  if (text == "none") return ThresholdMode::none;
  throw std::invalid_argument("unknown threshold mode '" + text + "' (expected hard, soft or none)");
}

AuxKind parse_aux_kind(const std::string& text) {
  if (text == "kde_sj" || text == "kde") return AuxKind::kde_sj;
  if (text == "wavelet") return AuxKind::wavelet;
  if (text == "none") return AuxKind::none;
  throw std::invalid_argument("unknown auxiliary estimator '" + text + "'");
}

Method parse_method(const std::string& text) {
  if (text == "m1") return Method::m1;
  if (text == "m2") return Method::m2;
  if (text == "m3") return Method::m3;
  if (text == "m4") return Method::m4;
  throw std::invalid_argument("unknown method '" + text + "' (expected m1, m2, m3 or m4)");
}

int resolve_finest_level(double p, std::size_t n) {
  if (!(p > 0.0) || n < 2) throw std::invalid_argument("level fraction must be positive and n >= 2");
  return static_cast<int>(std::ceil(p * std::log2(static_cast<double>(n))));
}

double default_level_fraction(Method method) {
  return (method == Method::m3 || method == Method::m4) ? 0.95 : 0.45;
}

void EstimatorConfig::validate() const {
  if (!(power >= 0.5) || !std::isfinite(power)) throw std::invalid_argument("power a must be >= 1/2");
  if (j0 < 0) throw std::invalid_argument("J0 must be nonnegative");
  if (j1 < j0) throw std::invalid_argument("J1 must be at least J0");
  if (j1 > 30) throw std::invalid_argument("J1 is limited to 30");
  if (needs_aux() && aux == AuxKind::none)
    throw std::invalid_argument("an auxiliary density estimate is required when a != 1 or the warp is empirical");
  if (epsilon && !(*epsilon >= 0.0 && *epsilon < 0.5))
    throw std::invalid_argument("epsilon must lie in [0, 1/2)");
  if (!(density_floor > 0.0)) throw std::invalid_argument("density floor must be positive");
  if (precision.n_dyadic_digits < 1) throw std::invalid_argument("n_dyadic_digits must be >= 1");
  if (aux_level < -1) throw std::invalid_argument("aux_level must be -1 (automatic) or a level >= 0");
}

double EstimatorConfig::resolved_epsilon() const {
  if (epsilon) return *epsilon;
  return std::min(std::pow(1.9, -static_cast<double>(j1)), 0.25);
}

EstimatorConfig method_config(Method method, int j0, int j1, const EstimateOptions& options) {
  EstimatorConfig config;
  config.power = (method == Method::m1 || method == Method::m3) ? 0.5 : 1.0;
  config.warp_kind = (method == Method::m3 || method == Method::m4) ? WarpKind::empirical
                                                                      : WarpKind::identity;
  if (options.power) config.power = *options.power;
  config.j0 = j0;
  config.j1 = j1;
  config.threshold = options.threshold;
  config.aux = options.aux;
  config.filter = options.filter;
  config.epsilon = options.epsilon;
  config.density_floor = options.density_floor;
  config.mad_normalize = options.mad_normalize;
  config.aux_level = options.aux_level;
  return config;
}

double estimate_mu_hat(std::span<const double> sample, const WeightFunction& w) {
  check_sample(sample, 1);
  const auto weights = w.evaluate_positive(sample);
  double inv_sum = 0.0;
  for (double v : weights) inv_sum += 1.0 / v;
  return static_cast<double>(sample.size()) / inv_sum;
}

double cox_cdf(std::span<const double> sample, const WeightFunction& w, double x) {
  check_sample(sample, 1);
  const auto weights = w.evaluate_positive(sample);
  // mu_hat / n = 1 / sum w^-1, so the estimate is a ratio of partial sums.
  double total = 0.0;
  double below = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double inv = 1.0 / weights[i];
    total += inv;
    if (sample[i] <= x) below += inv;
  }
  return below == total ? 1.0 : below / total;
}

DomainTransform compute_transform(std::span<const double> sample, double epsilon) {
  check_sample(sample, 2);
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in [0, 1/2)");
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw std::invalid_argument("sample has zero range");
  DomainTransform t;
  t.epsilon = epsilon;
  t.s = range / (1.0 - 2.0 * epsilon);
  t.q = *lo - epsilon * t.s;
  return t;
}

SampleTerms prepare_terms(const CoefficientInputs& inputs, const EstimatorConfig& config) {
  const std::size_t n = inputs.transformed.size();
  if (n == 0) throw std::invalid_argument("no observations");
  if (inputs.weights.size() != n) throw std::invalid_argument("one weight per observation is required");
  if (inputs.warp == nullptr) throw std::invalid_argument("a warp function is required");
  const bool empirical = inputs.warp->kind() == WarpKind::empirical;
  const double a = config.power;
  const bool uses_aux = a != 1.0 || empirical;
  if (uses_aux && inputs.aux == nullptr)
    throw std::invalid_argument("auxiliary density estimate missing (required when a != 1 or warp is empirical)");

  SampleTerms terms;
  terms.positions.resize(n);
  terms.factors.resize(n);
  const double lead = std::pow(inputs.mu_hat, a) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = inputs.transformed[i];
    terms.positions[i] = inputs.warp->cdf(y);
    double factor = lead / std::pow(inputs.weights[i], a);
    if (uses_aux) {
      double g = (*inputs.aux)(y);
      if (!(g >= config.density_floor)) {
        g = config.density_floor;
        ++terms.clamped;
      }
      factor *= empirical ? std::pow(g, a) : std::pow(g, a - 1.0) * inputs.warp->density(y);
    } else {
      factor *= inputs.warp->density(y);
    }
    terms.factors[i] = factor;
  }
  return terms;
}

std::vector<double> scaling_coefficients(const WaveletBasis& basis, const CoefficientInputs& inputs,
                                         const EstimatorConfig& config) {
  const auto terms = prepare_terms(inputs, config);
  std::vector<double> c;
  DetailCoefficients d;
  accumulate(basis, terms, config.j0, config.j0, c, d);
  return c;
}

DetailCoefficients detail_coefficients(const WaveletBasis& basis, const CoefficientInputs& inputs,
                                       const EstimatorConfig& config) {
  const auto terms = prepare_terms(inputs, config);
  std::vector<double> c;
  DetailCoefficients d;
  accumulate(basis, terms, config.j0, config.j1, c, d);
  return d;
}

ThresholdResult universal_threshold(const DetailCoefficients& details, ThresholdMode mode,
                                    bool mad_normalize) {
  if (details.empty() || details.back().empty())
    throw std::invalid_argument("universal threshold needs at least one detail level");
  ThresholdResult out;
  const auto& finest = details.back();
  const double center = median(finest);
  std::vector<double> deviations;
  deviations.reserve(finest.size());
  for (double v : finest) deviations.push_back(std::abs(v - center));
  const double mad = median(std::move(deviations));
  out.sigma_hat = mad_normalize ? mad / 0.6745 : mad;
  out.lambda = out.sigma_hat * std::sqrt(2.0 * std::log(static_cast<double>(finest.size())));

  out.d_star = details;
  if (mode == ThresholdMode::none) return out;
  for (auto& level : out.d_star) {
    for (double& v : level) {
      const double mag = std::abs(v);
      if (mode == ThresholdMode::hard) {
        if (!(mag > out.lambda)) v = 0.0;
      } else {
        v = mag > out.lambda ? std::copysign(mag - out.lambda, v) : 0.0;
      }
    }
  }
  return out;
}

PowerDensityEstimate::PowerDensityEstimate(EstimatorConfig config, DomainTransform transform,
                                           WarpFunction warp, CoefficientSet coeffs, double mu_hat,
                                           EstimateDiagnostics diagnostics,
                                           std::shared_ptr<const AuxDensity> aux)
    : config_(std::move(config)),
      transform_(transform),
      warp_(std::move(warp)),
      coeffs_(std::move(coeffs)),
      mu_hat_(mu_hat),
      diagnostics_(diagnostics),
      aux_(std::move(aux)),
      basis_(load_filter(config_.filter), config_.precision) {
  config_.validate();
  if (coeffs_.c.size() != (std::size_t{1} << config_.j0))
    throw std::invalid_argument("scaling coefficient count must be 2^J0");
  if (coeffs_.d_star.size() != static_cast<std::size_t>(config_.j1 - config_.j0))
    throw std::invalid_argument("detail coefficient levels must span [J0, J1)");
}

double PowerDensityEstimate::warped_power(double u) const {
  return basis_.synthesize(u, config_.j0, coeffs_.c, coeffs_.d_star);
}

DensityValue PowerDensityEstimate::evaluate(double x) const {
  DensityValue out;
  const double u = transform_.forward(x);
  if (!(u >= 0.0 && u <= 1.0)) return out;
  const double r = warped_power(warp_.cdf(u));
  const double a = config_.power;
  const double inv = 1.0 / a;
  double f;
  if (is_even_integer(inv)) {
    f = std::pow(r, inv);
  } else if (a == 1.0) {
    f = r;
  } else if (r < 0.0) {
    out.clamped = true;
    f = 0.0;
  } else {
    f = std::pow(r, inv);
  }
  out.f_hat = f / transform_.s;
  out.f_hat_a = r / std::pow(transform_.s, a);
  return out;
}

std::vector<double> PowerDensityEstimate::density_grid(std::span<const double> xs,
                                                       bool clip_renormalize) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(density(x));
  if (!clip_renormalize || xs.size() < 2) return out;
  for (double& v : out) v = std::max(v, 0.0);
  double mass = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) mass += 0.5 * (out[i] + out[i - 1]) * (xs[i] - xs[i - 1]);
  if (mass > 0.0)
    for (double& v : out) v /= mass;
  return out;
}

DensityValue synthesize(const PowerDensityEstimate& estimate, double x) { return estimate.evaluate(x); }

PowerDensityEstimate fit_power_density(std::span<const double> sample, const WeightFunction& w,
                                       const EstimatorConfig& config) {
  config.validate();
  check_sample(sample, 2);
  const auto weights = w.evaluate_positive(sample);
  double inv_sum = 0.0;
  for (double v : weights) inv_sum += 1.0 / v;
  const double mu_hat = static_cast<double>(sample.size()) / inv_sum;

  const auto transform = compute_transform(sample, config.resolved_epsilon());
  std::vector<double> tsample;
  tsample.reserve(sample.size());
  for (double y : sample) tsample.push_back(std::clamp(transform.forward(y), 0.0, 1.0));

  EstimateDiagnostics diag;
  diag.n = sample.size();

  const WaveletBasis basis(load_filter(config.filter), config.precision);
  std::shared_ptr<const AuxDensity> aux;
  if (config.needs_aux()) {
    if (config.aux == AuxKind::kde_sj) {
      auto kde = KernelDensityEstimate::fit(tsample);
      diag.aux_bandwidth = kde.bandwidth();
      diag.aux_fallback = kde.used_fallback();
      aux = std::make_shared<const AuxDensity>(std::move(kde));
    } else {
      int level = config.aux_level;
      if (level < 0) level = static_cast<int>(std::floor(std::log2(static_cast<double>(sample.size())) / 3.0));
      aux = std::make_shared<const AuxDensity>(wavelet_density(tsample, basis, level));
    }
  }

  WarpFunction warp = config.warp_kind == WarpKind::empirical ? WarpFunction::empirical(tsample)
                                                              : WarpFunction::identity();
  if (config.warp_kind == WarpKind::parametric)
    throw std::invalid_argument("parametric warps are not fitted from data");

  CoefficientInputs inputs{tsample, weights, mu_hat, &warp, aux.get()};
  const auto terms = prepare_terms(inputs, config);
  diag.aux_clamped = terms.clamped;

  CoefficientSet coeffs;
  accumulate(basis, terms, config.j0, config.j1, coeffs.c, coeffs.d);
  if (config.j1 > config.j0 && config.threshold != ThresholdMode::none) {
    auto th = universal_threshold(coeffs.d, config.threshold, config.mad_normalize);
    coeffs.d_star = std::move(th.d_star);
    coeffs.sigma_hat = th.sigma_hat;
    coeffs.lambda = th.lambda;
  } else {
    coeffs.d_star = coeffs.d;
  }
  for (const auto& level : coeffs.d_star)
    diag.retained_details += static_cast<std::size_t>(std::count_if(level.begin(), level.end(), [](double v) { return v != 0.0; }));

  return PowerDensityEstimate(config, transform, std::move(warp), std::move(coeffs), mu_hat, diag,
                              std::move(aux));
}

PowerDensityEstimate estimate_density(std::span<const double> sample, const WeightFunction& w,
                                      Method method, int j0, int j1, const EstimateOptions& options) {
  return fit_power_density(sample, w, method_config(method, j0, j1, options));
}

}  // namespace sbwave
