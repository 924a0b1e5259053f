#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/cascade.hpp"
#include "oracles/unweighted_estimator.hpp"
#include "sbwave/wavelet_basis.hpp"

using namespace sbwave;

namespace {

const WaveletBasis& sym10() {
  static const WaveletBasis basis(load_filter("sym10"));
  return basis;
}

const WaveletBasis& haar() {
  static const WaveletBasis basis(load_filter("haar"));
  return basis;
}

// Trapezoid rule over [lo, hi] with `points` nodes.
template <typename Fn>
double trapezoid(Fn fn, double lo, double hi, std::size_t points) {
  const double h = (hi - lo) / static_cast<double>(points - 1);
  double sum = 0.5 * (fn(lo) + fn(hi));
  for (std::size_t i = 1; i + 1 < points; ++i) sum += fn(lo + h * static_cast<double>(i));
  return sum * h;
}

}  // namespace

TEST_CASE("haar phi and psi are the indicator and the step") {
  CHECK(haar().phi(0.3) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(haar().psi(0.25) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(haar().psi(0.75) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(haar().phi(1.0) == 0.0);
  CHECK(haar().phi(-0.1) == 0.0);
}

TEST_CASE("phi and psi vanish outside the support") {
  CHECK(sym10().phi(-1.0) == 0.0);
  CHECK(sym10().phi(19.0) == 0.0);
  CHECK(sym10().phi(25.5) == 0.0);
  CHECK(sym10().psi(-0.01) == 0.0);
  CHECK(sym10().psi(19.5) == 0.0);
  CHECK(sym10().phi(std::nan("")) == 0.0);
}

TEST_CASE("integer values sum to one") {
  for (const char* name : {"haar", "db2", "db4", "sym8", "sym10"}) {
    CAPTURE(name);
    const WaveletBasis basis(load_filter(name));
    double sum = 0.0;
    for (double v : basis.integer_values()) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("sym10 phi at 7.25 matches the cascade table") {
  const auto table = oracle::cascade_phi(load_filter("sym10"), 20);
  const long idx = static_cast<long>(7.25 * std::ldexp(1.0, 20));
  CHECK(std::abs(sym10().phi(7.25) - table.at(idx)) < 1e-6);
}

TEST_CASE("phi and psi agree with the cascade oracle on the level-10 grid") {
  for (const char* name : {"db2", "db4", "sym6", "sym10"}) {
    CAPTURE(name);
    const auto filter = load_filter(name);
    const WaveletBasis basis(filter);
    const auto phi = oracle::cascade_phi(filter, 10);
    const auto psi = oracle::cascade_psi(filter, 10);
    double worst_phi = 0.0;
    double worst_psi = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
      const double x = static_cast<double>(i) * phi.step();
      worst_phi = std::max(worst_phi, std::abs(basis.phi(x) - phi.values[i]));
      worst_psi = std::max(worst_psi, std::abs(basis.psi(x) - psi[i]));
    }
    CHECK(worst_phi < 1e-6);
    CHECK(worst_psi < 1e-6);
  }
}

TEST_CASE("cascade oracle: haar is one on [0,1) and sym10 has unit mass") {
  const auto h = oracle::cascade_phi(load_filter("haar"), 3);
  for (long i = 0; i < 8; ++i) CHECK(h.at(i) == doctest::Approx(1.0));
  const auto s = oracle::cascade_phi(load_filter("sym10"), 12);
  double mass = 0.0;
  for (double v : s.values) mass += v;
  CHECK(std::abs(mass * s.step() - 1.0) < 1e-6);
}

TEST_CASE("psi has vanishing moments up to order four") {
  for (int r = 0; r <= 4; ++r) {
    CAPTURE(r);
    const double m = trapezoid([&](double x) { return std::pow(x, r) * sym10().psi(x); }, 0.0, 19.0, 1 << 14);
    CHECK(std::abs(m) < 1e-4);
  }
  const double zeroth = trapezoid([](double x) { return sym10().psi(x); }, 0.0, 19.0, 1 << 14);
  CHECK(std::abs(zeroth) < 1e-5);
}

TEST_CASE("precision: 20 and 40 digits agree to 1e-9") {
  const WaveletBasis coarse(load_filter("sym10"), EvalPrecision{20});
  const WaveletBasis fine(load_filter("sym10"), EvalPrecision{40});
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 19.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = unif(rng);
    worst = std::max(worst, std::abs(coarse.phi(x) - fine.phi(x)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("dyadic inputs are exact at low digit counts") {
  const WaveletBasis few(load_filter("sym10"), EvalPrecision{2});
  CHECK(std::abs(few.phi(7.25) - sym10().phi(7.25)) < 1e-13);
  CHECK_THROWS_AS(WaveletBasis(load_filter("haar"), EvalPrecision{0}), std::invalid_argument);
}

TEST_CASE("periodized haar atoms at level zero") {
  for (double y : {0.0, 0.2, 0.5, 0.99})
    CHECK(haar().periodized_phi(0, 0, y) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(haar().periodized_psi(0, 0, 0.25) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("sym10 level 3 atoms sum to 2^{3/2}") {
  for (double y : {0.1, 0.37, 0.9}) {
    double sum = 0.0;
    for (long k = 0; k < 8; ++k) sum += std::pow(2.0, -1.5) * sym10().periodized_phi(3, k, y);
    CHECK(std::abs(sum - 1.0) < 1e-8);
  }
}

TEST_CASE("periodized atoms equal brute-force lattice sums") {
  CHECK(sym10().periodized_phi(4, 5, 0.5) == doctest::Approx(oracle::lattice_phi(sym10(), 4, 5, 0.5)).epsilon(1e-12));
  CHECK(sym10().periodized_psi(4, 0, 0.9) == doctest::Approx(oracle::lattice_psi(sym10(), 4, 0, 0.9)).epsilon(1e-12));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double y = unif(rng);
    const int j = t % 7;
    const long k = static_cast<long>(t) % (1L << j);
    CHECK(std::abs(sym10().periodized_phi(j, k, y) - oracle::lattice_phi(sym10(), j, k, y)) < 1e-12);
    CHECK(std::abs(sym10().periodized_psi(j, k, y) - oracle::lattice_psi(sym10(), j, k, y)) < 1e-12);
  }
}

TEST_CASE("translation index is range checked") {
  CHECK_THROWS_AS((void)sym10().periodized_phi(3, 8, 0.5), std::out_of_range);
  CHECK_THROWS_AS((void)sym10().periodized_psi(3, -1, 0.5), std::out_of_range);
}

TEST_CASE("partition of unity for every filter and level 0..6") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> ys(100);
  for (double& y : ys) y = unif(rng);
  for (const auto& name : available_filters()) {
    CAPTURE(name);
    const WaveletBasis basis(load_filter(name));
    double worst = 0.0;
    for (int j = 0; j <= 6; ++j) {
      for (double y : ys) {
        std::vector<double> out(std::size_t{1} << j, 0.0);
        basis.add_periodized_phi(j, y, std::pow(2.0, -0.5 * j), out);
        double sum = 0.0;
        for (double v : out) sum += v;
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("level 4 scaling atoms are orthonormal and orthogonal to same-level wavelets") {
  constexpr std::size_t points = 1 << 14;
  constexpr int j = 4;
  std::vector<std::vector<double>> phis(std::size_t{1} << j, std::vector<double>(points));
  std::vector<double> psi32(points), phi31(points);
  const double h = 1.0 / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double y = h * static_cast<double>(i);
    std::vector<double> row(std::size_t{1} << j, 0.0);
    sym10().add_periodized_phi(j, y, 1.0, row);
    for (std::size_t k = 0; k < row.size(); ++k) phis[k][i] = row[k];
    phi31[i] = sym10().periodized_phi(3, 1, y);
    psi32[i] = sym10().periodized_psi(3, 2, y);
  }
  auto inner = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.5 * (a.front() * b.front() + a.back() * b.back());
    for (std::size_t i = 1; i + 1 < points; ++i) s += a[i] * b[i];
    return s * h;
  };
  double worst = 0.0;
  for (std::size_t a = 0; a < phis.size(); ++a)
    for (std::size_t b = a; b < phis.size(); ++b)
      worst = std::max(worst, std::abs(inner(phis[a], phis[b]) - (a == b ? 1.0 : 0.0)));
  CHECK(worst < 5e-4);
  CHECK(std::abs(inner(phi31, psi32)) < 1e-5);
}

TEST_CASE("accumulate_atoms matches per-atom evaluation") {
  std::vector<double> c(2, 0.0);
  std::vector<std::vector<double>> d{std::vector<double>(2, 0.0), std::vector<double>(4, 0.0),
                                     std::vector<double>(8, 0.0)};
  const double y = 0.3141;
  sym10().accumulate_atoms(y, 1, 4, 0.5, c, d);
  for (long k = 0; k < 2; ++k) CHECK(c[k] == doctest::Approx(0.5 * sym10().periodized_phi(1, k, y)).epsilon(1e-12));
  for (int j = 1; j < 4; ++j)
    for (long k = 0; k < (1L << j); ++k)
      CHECK(d[j - 1][k] == doctest::Approx(0.5 * sym10().periodized_psi(j, k, y)).epsilon(1e-12));
  const double direct = sym10().synthesize(y, 1, c, d);
  double manual = 0.0;
  for (long k = 0; k < 2; ++k) manual += c[k] * sym10().periodized_phi(1, k, y);
  for (int j = 1; j < 4; ++j)
    for (long k = 0; k < (1L << j); ++k) manual += d[j - 1][k] * sym10().periodized_psi(j, k, y);
  CHECK(direct == doctest::Approx(manual).epsilon(1e-12));
}
