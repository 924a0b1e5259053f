#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbwave/aux_density.hpp"
#include "sbwave/warp.hpp"
#include "sbwave/wavelet_basis.hpp"
#include "sbwave/weight.hpp"

namespace sbwave {

enum class ThresholdMode { hard, soft, none };
enum class AuxKind { kde_sj, wavelet, none };

/// The four named special cases: m1 (a = 1/2, H = x), m2 (a = 1, H = x),
/// m3 (a = 1/2, H = empirical CDF), m4 (a = 1, H = empirical CDF).
enum class Method { m1, m2, m3, m4 };

std::string to_string(ThresholdMode mode);
std::string to_string(AuxKind kind);
std::string to_string(Method method);
ThresholdMode parse_threshold_mode(const std::string& text);
AuxKind parse_aux_kind(const std::string& text);
Method parse_method(const std::string& text);

/// J1 = ceil(p log2 n).
int resolve_finest_level(double p, std::size_t n);

/// p used for J1 when none is given: 0.45 for the unwarped methods, 0.95 for
/// the warped ones.
double default_level_fraction(Method method);

struct EstimatorConfig {
  double power = 1.0;
  int j0 = 0;
  int j1 = 0;
  WarpKind warp_kind = WarpKind::identity;
  ThresholdMode threshold = ThresholdMode::hard;
  AuxKind aux = AuxKind::kde_sj;
  std::string filter = "sym10";
  EvalPrecision precision{};
  /// Interval margin; 1.9^-J1 (capped at 0.25) when unset.
  std::optional<double> epsilon;
  /// Lower clamp for auxiliary density values.
  double density_floor = 1e-6;
  /// Divide the MAD by 0.6745 to get a standard-deviation scale.
  bool mad_normalize = true;
  /// Resolution level of the wavelet auxiliary estimator; -1 picks
  /// floor(log2(n) / 3).
  int aux_level = -1;

  /// Throws std::invalid_argument when the fields are inconsistent.
  void validate() const;
  double resolved_epsilon() const;
  bool needs_aux() const { return power != 1.0 || warp_kind == WarpKind::empirical; }
};

struct EstimateOptions {
  ThresholdMode threshold = ThresholdMode::hard;
  AuxKind aux = AuxKind::kde_sj;
  std::string filter = "sym10";
  std::optional<double> epsilon;
  std::optional<double> power;  // overrides the method's a
  double density_floor = 1e-6;
  bool mad_normalize = true;
  int aux_level = -1;
};

EstimatorConfig method_config(Method method, int j0, int j1, const EstimateOptions& options = {});

/// mu_hat = n / sum 1 / w(Y_i).
double estimate_mu_hat(std::span<const double> sample, const WeightFunction& w);

/// Cox's weighted CDF: (mu_hat / n) sum w^-1(Y_i) 1(Y_i <= x).
double cox_cdf(std::span<const double> sample, const WeightFunction& w, double x);

/// Affine map t(y) = (y - q) / s sending [y_(1), y_(n)] onto [eps, 1 - eps].
struct DomainTransform {
  double q = 0.0;
  double s = 1.0;
  double epsilon = 0.0;

  double forward(double y) const { return (y - q) / s; }
  double inverse(double u) const { return q + s * u; }
};

/// Solves t(y_(1)) = eps and t(y_(n)) = 1 - eps: s = r / (1 - 2 eps),
/// q = y_(1) - eps s. Throws for a zero range or eps outside [0, 1/2).
DomainTransform compute_transform(std::span<const double> sample, double epsilon);

using DetailCoefficients = std::vector<std::vector<double>>;

/// What the coefficient estimators need about the sample. `transformed`
/// holds Y_i mapped into [0,1]; `weights` holds w(Y_i) on the original scale.
struct CoefficientInputs {
  std::span<const double> transformed;
  std::span<const double> weights;
  double mu_hat = 1.0;
  const WarpFunction* warp = nullptr;
  const AuxDensity* aux = nullptr;
};

/// Per-observation atom positions H(Y_i) and multipliers
/// (mu_hat^a / n) g^(a-1)(Y_i) h(Y_i) / w^a(Y_i); for the empirical warp the
/// density h is replaced by the auxiliary estimate, giving g^a / w^a.
struct SampleTerms {
  std::vector<double> positions;
  std::vector<double> factors;
  std::size_t clamped = 0;  // auxiliary values raised to the floor
};

SampleTerms prepare_terms(const CoefficientInputs& inputs, const EstimatorConfig& config);

/// c_{J0,k}, k = 0..2^J0 - 1.
std::vector<double> scaling_coefficients(const WaveletBasis& basis, const CoefficientInputs& inputs,
                                         const EstimatorConfig& config);

/// d_{jk} for j = J0..J1-1; empty when J1 == J0.
DetailCoefficients detail_coefficients(const WaveletBasis& basis, const CoefficientInputs& inputs,
                                       const EstimatorConfig& config);

struct ThresholdResult {
  DetailCoefficients d_star;
  double sigma_hat = 0.0;
  double lambda = 0.0;
};

/// Universal threshold lambda = sigma_hat sqrt(2 log 2^(J1-1)), sigma_hat the
/// median absolute deviation of the finest level (over 0.6745 when
/// `mad_normalize`). One lambda is applied to every level.
ThresholdResult universal_threshold(const DetailCoefficients& details, ThresholdMode mode,
                                    bool mad_normalize = true);

struct CoefficientSet {
  std::vector<double> c;
  DetailCoefficients d;
  DetailCoefficients d_star;
  double sigma_hat = 0.0;
  double lambda = 0.0;
};

struct EstimateDiagnostics {
  std::size_t n = 0;
  std::size_t aux_clamped = 0;
  double aux_bandwidth = 0.0;
  bool aux_fallback = false;
  std::size_t retained_details = 0;
};

struct DensityValue {
  double f_hat_a = 0.0;  // estimate of f^a on the original scale
  double f_hat = 0.0;
  bool clamped = false;  // negative power value clamped before the 1/a root
};

class PowerDensityEstimate {
 public:
  PowerDensityEstimate(EstimatorConfig config, DomainTransform transform, WarpFunction warp,
                       CoefficientSet coeffs, double mu_hat, EstimateDiagnostics diagnostics,
                       std::shared_ptr<const AuxDensity> aux = nullptr);

  /// Evaluates the synthesis at H(t(x)) and back-transforms. Points whose
  /// transformed image leaves [0,1] evaluate to zero.
  DensityValue evaluate(double x) const;
  double density(double x) const { return evaluate(x).f_hat; }

  /// Density on a grid; with `clip_renormalize` negatives are set to zero
  /// and the result rescaled to unit trapezoid mass over the grid.
  std::vector<double> density_grid(std::span<const double> xs, bool clip_renormalize = false) const;

  /// The wavelet sum itself at u in [0,1] (the estimate of f^a composed
  /// with H* in transformed coordinates).
  double warped_power(double u) const;

  const EstimatorConfig& config() const { return config_; }
  const DomainTransform& transform() const { return transform_; }
  const WarpFunction& warp() const { return warp_; }
  const CoefficientSet& coefficients() const { return coeffs_; }
  double mu_hat() const { return mu_hat_; }
  const EstimateDiagnostics& diagnostics() const { return diagnostics_; }
  const AuxDensity* aux() const { return aux_.get(); }
  const WaveletBasis& basis() const { return basis_; }

 private:
  EstimatorConfig config_;
  DomainTransform transform_;
  WarpFunction warp_;
  CoefficientSet coeffs_;
  double mu_hat_;
  EstimateDiagnostics diagnostics_;
  std::shared_ptr<const AuxDensity> aux_;
  WaveletBasis basis_;
};

/// Free-function form of PowerDensityEstimate::evaluate.
DensityValue synthesize(const PowerDensityEstimate& estimate, double x);

/// Full pipeline: transform, auxiliary fit, warp, coefficients, threshold.
PowerDensityEstimate fit_power_density(std::span<const double> sample, const WeightFunction& w,
                                       const EstimatorConfig& config);

PowerDensityEstimate estimate_density(std::span<const double> sample, const WeightFunction& w,
                                      Method method, int j0, int j1,
                                      const EstimateOptions& options = {});

}  // namespace sbwave
