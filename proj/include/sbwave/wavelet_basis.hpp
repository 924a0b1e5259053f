#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace sbwave {

/// Orthonormal compactly supported QMF filter.
///
/// `lowpass` holds h_0..h_{2N-1} normalised so that sum(h) = sqrt(2). The
/// scaling function solves phi(x) = sqrt(2) sum_k h_k phi(2x - k) and is
/// supported on [0, 2N-1]. The highpass filter is g_k = (-1)^k h_{2N-1-k},
/// which puts psi on the same support.
struct WaveletFilter {
  std::string name;
  std::vector<double> lowpass;
  int n_vanishing_moments = 0;

  int support_length() const { return static_cast<int>(lowpass.size()) - 1; }
  double highpass(std::size_t k) const;
};

/// Names accepted by load_filter, in table order.
std::vector<std::string> available_filters();

/// Looks up a shipped filter and verifies its QMF invariants.
/// Throws std::invalid_argument for unknown names (the message lists the
/// available ones) and std::logic_error if a table fails verification.
WaveletFilter load_filter(std::string_view name);

/// Checks sum(h) = sqrt(2) and sum_k h_k h_{k+2m} = delta_{m,0}.
void validate_filter(const WaveletFilter& filter, double tolerance = 1e-12);

struct EvalPrecision {
  int n_dyadic_digits = 30;
};

/// Pointwise evaluation of phi, psi and their periodized dilates by the
/// Daubechies-Lagarias matrix products.
///
/// For t in [0,1) let v(t) = (phi(t), phi(t+1), ..., phi(t+L-1)), L = 2N-1.
/// Then v(t/2) = T0 v(t) and v((t+1)/2) = T1 v(t), so v(t) is a product of
/// T0/T1 selected by the binary digits of t applied to v at the remainder.
/// The remainder vector is the linear interpolant of v(0) and v(1-) (the
/// fixed points of T0 and T1), which makes the result the piecewise linear
/// interpolant of phi on the 2^-digits grid and exact at dyadic points.
class WaveletBasis {
 public:
  explicit WaveletBasis(WaveletFilter filter, EvalPrecision precision = {});

  const WaveletFilter& filter() const { return filter_; }
  const EvalPrecision& precision() const { return precision_; }
  int support_length() const { return support_; }

  double phi(double x) const;
  double psi(double x) const;

  /// phi^p_{jk}(y) = sum_l 2^{j/2} phi(2^j (y - l) - k), y in [0,1].
  double periodized_phi(int j, long k, double y) const;
  double periodized_psi(int j, long k, double y) const;

  /// Writes phi(frac + i), i = 0..L-1, for frac in [0,1).
  void shifted_values(double frac, std::span<double> out) const;

  /// All periodized atoms at one level: out[k] += scale * phi^p_{jk}(y).
  void add_periodized_phi(int j, double y, double scale, std::span<double> out) const;
  void add_periodized_psi(int j, double y, double scale, std::span<double> out) const;

  /// Adds scale * phi^p_{j0,k}(y) to scaling[k] and scale * psi^p_{jk}(y) to
  /// details[j - j0][k] for j0 <= j < j1, sharing one digit chain across
  /// levels. `details` must already be sized 2^j per level.
  void accumulate_atoms(double y, int j0, int j1, double scale, std::span<double> scaling,
                        std::vector<std::vector<double>>& details) const;

  /// sum_k c_k phi^p_{j0,k}(y) + sum_{j,k} d_{jk} psi^p_{jk}(y).
  double synthesize(double y, int j0, std::span<const double> scaling,
                    const std::vector<std::vector<double>>& details) const;

  /// Integer-point values phi(0..L), exposed for diagnostics.
  std::vector<double> integer_values() const;

 private:
  using Vec = Eigen::VectorXd;

  // v(frac(2^j y)) for j = lo..hi, plus floor(2^j y) per level.
  struct Chain {
    int lo = 0;
    std::vector<Vec> vectors;
    std::vector<long> integer_parts;
  };
  Chain chain(double y, int lo, int hi) const;
  void scatter_phi(const Vec& v, long shift, int j, double scale, std::span<double> out) const;
  void scatter_psi(const Vec& v, long shift, int j, double scale, std::span<double> out) const;

  WaveletFilter filter_;
  EvalPrecision precision_;
  int support_ = 0;
  Eigen::MatrixXd t0_;
  Eigen::MatrixXd t1_;
  Vec v0_;
  Vec v1_;
};

}  // namespace sbwave
