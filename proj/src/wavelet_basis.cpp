#include "sbwave/wavelet_basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sbwave {
namespace {

long positive_mod(long value, long modulus) {
  const long r = value % modulus;
  return r < 0 ? r + modulus : r;
}

// Unit-sum fixed point of a column-stochastic-like transition matrix.
Eigen::VectorXd unit_sum_fixed_point(const Eigen::MatrixXd& t, const std::string& name) {
  const Eigen::Index n = t.rows();
  Eigen::MatrixXd system = t - Eigen::MatrixXd::Identity(n, n);
  system.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible())
    throw std::logic_error("filter '" + name + "' has no unique refinable integer values");
  return lu.solve(rhs);
}

}  // namespace

WaveletBasis::WaveletBasis(WaveletFilter filter, EvalPrecision precision)
    : filter_(std::move(filter)), precision_(precision) {
  if (precision_.n_dyadic_digits < 1)
    throw std::invalid_argument("n_dyadic_digits must be at least 1");
  validate_filter(filter_);
  support_ = filter_.support_length();
  const int taps = static_cast<int>(filter_.lowpass.size());
  const double root2 = std::sqrt(2.0);
  t0_ = Eigen::MatrixXd::Zero(support_, support_);
  t1_ = Eigen::MatrixXd::Zero(support_, support_);
  for (int i = 0; i < support_; ++i) {
    for (int j = 0; j < support_; ++j) {
      const int a = 2 * i - j;
      const int b = 2 * i - j + 1;
      if (a >= 0 && a < taps) t0_(i, j) = root2 * filter_.lowpass[a];
      if (b >= 0 && b < taps) t1_(i, j) = root2 * filter_.lowpass[b];
    }
  }
  v0_ = unit_sum_fixed_point(t0_, filter_.name);
  v1_ = unit_sum_fixed_point(t1_, filter_.name);
}

std::vector<double> WaveletBasis::integer_values() const {
  std::vector<double> values(v0_.data(), v0_.data() + v0_.size());
  values.push_back(0.0);
  return values;
}

WaveletBasis::Chain WaveletBasis::chain(double y, int lo, int hi) const {
  const int depth = hi + precision_.n_dyadic_digits;
  std::vector<unsigned char> digits(static_cast<std::size_t>(depth) + 1, 0);
  const double base = std::floor(y);
  double frac = y - base;
  for (int i = 1; i <= depth; ++i) {
    frac *= 2.0;
    if (frac >= 1.0) {
      digits[i] = 1;
      frac -= 1.0;
    }
  }

  Chain out;
  out.lo = lo;
  out.vectors.resize(static_cast<std::size_t>(hi - lo + 1));
  out.integer_parts.resize(out.vectors.size());

  long integer_part = static_cast<long>(base);
  for (int j = 1; j <= hi; ++j) {
    integer_part = 2 * integer_part + digits[j];
    if (j >= lo) out.integer_parts[j - lo] = integer_part;
  }
  if (lo == 0) out.integer_parts[0] = static_cast<long>(base);

  Vec w = (1.0 - frac) * v0_ + frac * v1_;
  for (int i = depth; i > hi; --i) w = (digits[i] ? t1_ : t0_) * w;
  out.vectors[hi - lo] = w;
  for (int j = hi - 1; j >= lo; --j) {
    w = (digits[j + 1] ? t1_ : t0_) * w;
    out.vectors[j - lo] = w;
  }
  return out;
}

void WaveletBasis::shifted_values(double frac, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(support_))
    throw std::invalid_argument("shifted_values: output span must hold support_length values");
  const auto c = chain(frac - std::floor(frac), 0, 0);
  for (int i = 0; i < support_; ++i) out[i] = c.vectors[0](i);
}

double WaveletBasis::phi(double x) const {
  if (!(x >= 0.0 && x < support_)) return 0.0;
  const double whole = std::floor(x);
  const auto c = chain(x - whole, 0, 0);
  return c.vectors[0](static_cast<Eigen::Index>(whole));
}

double WaveletBasis::psi(double x) const {
  if (!(x >= 0.0 && x < support_)) return 0.0;
  const double z = 2.0 * x;
  const double whole = std::floor(z);
  const auto c = chain(z - whole, 0, 0);
  const long n1 = static_cast<long>(whole);
  const double root2 = std::sqrt(2.0);
  double sum = 0.0;
  for (std::size_t t = 0; t < filter_.lowpass.size(); ++t) {
    const long i = n1 - static_cast<long>(t);
    if (i >= 0 && i < support_) sum += filter_.highpass(t) * c.vectors[0](i);
  }
  return root2 * sum;
}

namespace {

// Calls fn(k, value) for every periodized phi atom at level j touched by
// the shift vector v = phi(frac + i), where floor(2^j y) = shift.
template <typename Fn>
void visit_phi(const Eigen::VectorXd& v, long shift, int j, Fn&& fn) {
  const long size = 1L << j;
  const double norm = std::pow(2.0, 0.5 * j);
  for (Eigen::Index i = 0; i < v.size(); ++i) fn(positive_mod(shift - i, size), norm * v(i));
}

// Same for psi at level j, given v and shift at level j + 1.
template <typename Fn>
void visit_psi(const WaveletFilter& filter, const Eigen::VectorXd& v, long shift, int j, Fn&& fn) {
  const long size = 1L << j;
  const double norm = std::pow(2.0, 0.5 * j) * std::sqrt(2.0);
  const long taps = static_cast<long>(filter.lowpass.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const long s = shift - i;
    // t must share the parity of s so that (s - t) / 2 is an integer.
    for (long t = positive_mod(s, 2); t < taps; t += 2) {
      const long m = (s - t) / 2;
      fn(positive_mod(m, size), norm * filter.highpass(static_cast<std::size_t>(t)) * v(i));
    }
  }
}

void check_level(int j) {
  if (j < 0 || j > 40) throw std::out_of_range("resolution level out of range: " + std::to_string(j));
}

void check_index(int j, long k) {
  check_level(j);
  if (k < 0 || k >= (1L << j))
    throw std::out_of_range("translation index " + std::to_string(k) + " out of range for level " +
                            std::to_string(j));
}

}  // namespace

double WaveletBasis::periodized_phi(int j, long k, double y) const {
  check_index(j, k);
  const auto c = chain(y, j, j);
  double sum = 0.0;
  visit_phi(c.vectors[0], c.integer_parts[0], j, [&](long idx, double value) {
    if (idx == k) sum += value;
  });
  return sum;
}

double WaveletBasis::periodized_psi(int j, long k, double y) const {
  check_index(j, k);
  const auto c = chain(y, j + 1, j + 1);
  double sum = 0.0;
  visit_psi(filter_, c.vectors[0], c.integer_parts[0], j, [&](long idx, double value) {
    if (idx == k) sum += value;
  });
  return sum;
}

void WaveletBasis::scatter_phi(const Vec& v, long shift, int j, double scale,
                               std::span<double> out) const {
  if (out.size() != (std::size_t{1} << j))
    throw std::invalid_argument("coefficient span must hold 2^j entries");
  visit_phi(v, shift, j, [&](long k, double value) { out[k] += scale * value; });
}

void WaveletBasis::scatter_psi(const Vec& v, long shift, int j, double scale,
                               std::span<double> out) const {
  if (out.size() != (std::size_t{1} << j))
    throw std::invalid_argument("coefficient span must hold 2^j entries");
  visit_psi(filter_, v, shift, j, [&](long k, double value) { out[k] += scale * value; });
}

void WaveletBasis::add_periodized_phi(int j, double y, double scale, std::span<double> out) const {
  check_level(j);
  const auto c = chain(y, j, j);
  scatter_phi(c.vectors[0], c.integer_parts[0], j, scale, out);
}

void WaveletBasis::add_periodized_psi(int j, double y, double scale, std::span<double> out) const {
  check_level(j);
  const auto c = chain(y, j + 1, j + 1);
  scatter_psi(c.vectors[0], c.integer_parts[0], j, scale, out);
}

void WaveletBasis::accumulate_atoms(double y, int j0, int j1, double scale,
                                    std::span<double> scaling,
                                    std::vector<std::vector<double>>& details) const {
  check_level(j0);
  check_level(j1);
  if (details.size() != static_cast<std::size_t>(std::max(0, j1 - j0)))
    throw std::invalid_argument("detail array must hold one row per level in [j0, j1)");
  const auto c = chain(y, j0, std::max(j0, j1));
  scatter_phi(c.vectors[0], c.integer_parts[0], j0, scale, scaling);
  for (int j = j0; j < j1; ++j) {
    const std::size_t next = static_cast<std::size_t>(j + 1 - j0);
    scatter_psi(c.vectors[next], c.integer_parts[next], j, scale, details[j - j0]);
  }
}

double WaveletBasis::synthesize(double y, int j0, std::span<const double> scaling,
                                const std::vector<std::vector<double>>& details) const {
  check_level(j0);
  const int j1 = j0 + static_cast<int>(details.size());
  check_level(j1);
  if (scaling.size() != (std::size_t{1} << j0))
    throw std::invalid_argument("scaling coefficients must hold 2^j0 entries");
  const auto c = chain(y, j0, j1);
  double sum = 0.0;
  visit_phi(c.vectors[0], c.integer_parts[0], j0,
            [&](long k, double value) { sum += scaling[k] * value; });
  for (int j = j0; j < j1; ++j) {
    const auto& row = details[j - j0];
    if (row.size() != (std::size_t{1} << j))
      throw std::invalid_argument("detail level must hold 2^j entries");
    const std::size_t next = static_cast<std::size_t>(j + 1 - j0);
    visit_psi(filter_, c.vectors[next], c.integer_parts[next], j,
              [&](long k, double value) { sum += row[k] * value; });
  }
  return sum;
}

}  // namespace sbwave
