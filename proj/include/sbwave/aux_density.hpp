#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sbwave/wavelet_basis.hpp"

namespace sbwave {

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> sample);

struct BandwidthResult {
  double bandwidth = 0.0;
  double silverman = 0.0;
  bool fallback = false;  // no bracketed root; Silverman's rule was used
};

/// Sheather-Jones solve-the-equation bandwidth for a Gaussian kernel.
///
/// The pilot functionals are estimated from pairwise differences binned on a
/// 1000-cell grid; the root of h = [R(K) / (n psi4(g(h)))]^(1/5) is found by
/// bisection on [h_S / 50, 50 h_S] to a relative tolerance of 1e-8.
/// Requires n >= 10 and positive variance (std::invalid_argument otherwise).
BandwidthResult sj_bandwidth_detailed(std::span<const double> sample);
double sj_bandwidth(std::span<const double> sample);

class KernelDensityEstimate {
 public:
  KernelDensityEstimate(std::vector<double> sample, double bandwidth);

  /// Gaussian KDE with the Sheather-Jones bandwidth.
  static KernelDensityEstimate fit(std::vector<double> sample);

  double operator()(double y) const;

  double bandwidth() const { return bandwidth_; }
  bool used_fallback() const { return fallback_; }
  const std::vector<double>& sample() const { return sample_; }

 private:
  std::vector<double> sample_;
  double bandwidth_;
  bool fallback_ = false;
};

/// Linear periodized wavelet estimator: alpha_k = mean phi^p_{jk}(Y_i).
class WaveletDensityEstimate {
 public:
  WaveletDensityEstimate(WaveletBasis basis, int level, std::vector<double> alphas);

  /// Synthesis on [0,1]; 0 outside.
  double operator()(double y) const;

  int level() const { return level_; }
  const std::vector<double>& alphas() const { return alphas_; }

 private:
  WaveletBasis basis_;
  int level_;
  std::vector<double> alphas_;
};

/// Throws std::invalid_argument if the sample leaves [0,1] or 2^level > n.
WaveletDensityEstimate wavelet_density(std::span<const double> sample, const WaveletBasis& basis,
                                       int level);

/// The fitted estimate of the biased density g used inside the coefficients.
class AuxDensity {
 public:
  explicit AuxDensity(KernelDensityEstimate kde) : impl_(std::move(kde)) {}
  explicit AuxDensity(WaveletDensityEstimate wde) : impl_(std::move(wde)) {}

  double operator()(double y) const {
    return std::visit([y](const auto& est) { return est(y); }, impl_);
  }

  bool is_kernel() const { return std::holds_alternative<KernelDensityEstimate>(impl_); }
  const KernelDensityEstimate* kernel() const { return std::get_if<KernelDensityEstimate>(&impl_); }
  const WaveletDensityEstimate* wavelet() const {
    return std::get_if<WaveletDensityEstimate>(&impl_);
  }

 private:
  std::variant<KernelDensityEstimate, WaveletDensityEstimate> impl_;
};

}  // namespace sbwave
