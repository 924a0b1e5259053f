#include "sbwave/aux_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sbwave {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1 / sqrt(2 pi)
constexpr std::size_t kBins = 1000;
constexpr double kMaxDelta = 1000.0;

double sample_sd(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

// Type-7 quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

double interquartile_range(std::span<const double> x) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
}

void check_sample(std::span<const double> x) {
  if (x.size() < 10) throw std::invalid_argument("bandwidth selection needs at least 10 observations");
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("bandwidth selection: non-finite observation");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw std::invalid_argument("bandwidth selection: sample has zero variance");
}

// Counts of pairwise |bin_i - bin_j| over i < j.
struct BinnedPairs {
  double width = 0.0;
  std::vector<double> counts;
};

BinnedPairs bin_pairs(std::span<const double> x) {
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double range = (*hi_it - lo) * 1.01;
  BinnedPairs out;
  out.width = range / static_cast<double>(kBins);
  std::vector<double> per_bin(kBins, 0.0);
  for (double v : x) {
    auto b = static_cast<std::size_t>((v - lo) / out.width);
    per_bin[std::min(b, kBins - 1)] += 1.0;
  }
  out.counts.assign(kBins, 0.0);
  for (std::size_t a = 0; a < kBins; ++a) {
    if (per_bin[a] == 0.0) continue;
    out.counts[0] += per_bin[a] * (per_bin[a] - 1.0) / 2.0;
    for (std::size_t b = a + 1; b < kBins; ++b) out.counts[b - a] += per_bin[a] * per_bin[b];
  }
  return out;
}

// Estimate of psi4 = int f''''f from binned pairs at pilot bandwidth h.
double psi4(const BinnedPairs& pairs, double n, double h) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.counts.size(); ++i) {
    double delta = static_cast<double>(i) * pairs.width / h;
    delta *= delta;
    if (delta >= kMaxDelta) break;
    sum += std::exp(-delta / 2.0) * (delta * delta - 6.0 * delta + 3.0) * pairs.counts[i];
  }
  sum = 2.0 * sum + 3.0 * n;
  return sum * kInvSqrt2Pi / (n * (n - 1.0) * std::pow(h, 5.0));
}

// Estimate of psi6 = int f''''''f.
double psi6(const BinnedPairs& pairs, double n, double h) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.counts.size(); ++i) {
    double delta = static_cast<double>(i) * pairs.width / h;
    delta *= delta;
    if (delta >= kMaxDelta) break;
    sum += std::exp(-delta / 2.0) *
           (delta * delta * delta - 15.0 * delta * delta + 45.0 * delta - 15.0) * pairs.counts[i];
  }
  sum = 2.0 * sum - 15.0 * n;
  return sum * kInvSqrt2Pi / (n * (n - 1.0) * std::pow(h, 7.0));
}

}  // namespace

double silverman_bandwidth(std::span<const double> sample) {
  check_sample(sample);
  const double sd = sample_sd(sample);
  const double iqr = interquartile_range(sample);
  const double scale = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * scale * std::pow(static_cast<double>(sample.size()), -0.2);
}

BandwidthResult sj_bandwidth_detailed(std::span<const double> sample) {
  check_sample(sample);
  BandwidthResult result;
  result.silverman = silverman_bandwidth(sample);
  result.bandwidth = result.silverman;
  result.fallback = true;

  const double n = static_cast<double>(sample.size());
  const double sd = sample_sd(sample);
  const double iqr = interquartile_range(sample);
  const double scale = iqr > 0.0 ? std::min(sd, iqr / 1.349) : sd;
  const auto pairs = bin_pairs(sample);

  // Normal-reference pilot bandwidths for psi4 and psi6.
  const double pilot_a = 1.24 * scale * std::pow(n, -1.0 / 7.0);
  const double pilot_b = 1.23 * scale * std::pow(n, -1.0 / 9.0);
  const double roughness = 1.0 / (2.0 * std::sqrt(std::numbers::pi) * n);
  const double td = -psi6(pairs, n, pilot_b);
  const double sd_a = psi4(pairs, n, pilot_a);
  if (!(std::isfinite(td) && td > 0.0 && std::isfinite(sd_a) && sd_a > 0.0)) return result;
  const double alpha2 = 1.357 * std::pow(sd_a / td, 1.0 / 7.0);

  auto equation = [&](double h) {
    const double s = psi4(pairs, n, alpha2 * std::pow(h, 5.0 / 7.0));
    if (!(s > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::pow(roughness / s, 0.2) - h;
  };

  double lo = result.silverman / 50.0;
  double hi = result.silverman * 50.0;
  double f_lo = equation(lo);
  const double f_hi = equation(hi);
  if (!(std::isfinite(f_lo) && std::isfinite(f_hi)) || f_lo * f_hi > 0.0) return result;

  while ((hi - lo) > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = equation(mid);
    if (!std::isfinite(f_mid)) return result;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  result.bandwidth = 0.5 * (lo + hi);
  result.fallback = false;
  return result;
}

double sj_bandwidth(std::span<const double> sample) { return sj_bandwidth_detailed(sample).bandwidth; }

KernelDensityEstimate::KernelDensityEstimate(std::vector<double> sample, double bandwidth)
    : sample_(std::move(sample)), bandwidth_(bandwidth) {
  if (sample_.empty()) throw std::invalid_argument("kernel density estimate needs observations");
  if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_))
    throw std::invalid_argument("kernel bandwidth must be positive");
}

KernelDensityEstimate KernelDensityEstimate::fit(std::vector<double> sample) {
  const auto bw = sj_bandwidth_detailed(sample);
  KernelDensityEstimate kde(std::move(sample), bw.bandwidth);
  kde.fallback_ = bw.fallback;
  return kde;
}

double KernelDensityEstimate::operator()(double y) const {
  double sum = 0.0;
  for (double v : sample_) {
    const double u = (y - v) / bandwidth_;
    sum += std::exp(-0.5 * u * u);
  }
  return sum * kInvSqrt2Pi / (static_cast<double>(sample_.size()) * bandwidth_);
}

WaveletDensityEstimate::WaveletDensityEstimate(WaveletBasis basis, int level,
                                               std::vector<double> alphas)
    : basis_(std::move(basis)), level_(level), alphas_(std::move(alphas)) {
  if (level_ < 0 || alphas_.size() != (std::size_t{1} << level_))
    throw std::invalid_argument("wavelet density: coefficient count must be 2^level");
}

double WaveletDensityEstimate::operator()(double y) const {
  if (!(y >= 0.0 && y <= 1.0)) return 0.0;
  static const std::vector<std::vector<double>> no_details;
  return basis_.synthesize(y, level_, alphas_, no_details);
}

WaveletDensityEstimate wavelet_density(std::span<const double> sample, const WaveletBasis& basis,
                                       int level) {
  if (sample.empty()) throw std::invalid_argument("wavelet density needs observations");
  if (level < 0 || level > 30) throw std::invalid_argument("wavelet density: level out of range");
  if ((std::size_t{1} << level) > sample.size())
    throw std::invalid_argument("wavelet density: 2^level exceeds the sample size");
  std::vector<double> alphas(std::size_t{1} << level, 0.0);
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (double y : sample) {
    if (!(y >= 0.0 && y <= 1.0))
      throw std::invalid_argument("wavelet density: observations must lie in [0,1]");
    basis.add_periodized_phi(level, y, inv_n, alphas);
  }
  return WaveletDensityEstimate(basis, level, std::move(alphas));
}

}  // namespace sbwave
