#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>

#include "sbwave/wavelet_basis.hpp"

using namespace sbwave;

TEST_CASE("haar lowpass is two equal taps") {
  const auto f = load_filter("haar");
  REQUIRE(f.lowpass.size() == 2);
  CHECK(f.lowpass[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(f.lowpass[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(f.support_length() == 1);
}

TEST_CASE("sym10 has twenty taps and support nineteen") {
  const auto f = load_filter("sym10");
  CHECK(f.lowpass.size() == 20);
  CHECK(f.support_length() == 19);
  CHECK(f.n_vanishing_moments == 10);
}

TEST_CASE("every shipped filter sums to sqrt 2 and is QMF orthonormal") {
  for (const auto& name : available_filters()) {
    CAPTURE(name);
    const auto f = load_filter(name);
    const double sum = std::accumulate(f.lowpass.begin(), f.lowpass.end(), 0.0);
    CHECK(std::abs(sum - std::sqrt(2.0)) < 1e-12);
    const long taps = static_cast<long>(f.lowpass.size());
    for (long m = 0; 2 * m < taps; ++m) {
      double dot = 0.0;
      for (long k = 0; k + 2 * m < taps; ++k) dot += f.lowpass[k] * f.lowpass[k + 2 * m];
      CHECK(std::abs(dot - (m == 0 ? 1.0 : 0.0)) < 1e-12);
    }
    CHECK(f.lowpass.size() == static_cast<std::size_t>(2 * f.n_vanishing_moments));
  }
}

TEST_CASE("highpass follows g_k = (-1)^k h_{2N-1-k}") {
  const auto f = load_filter("db3");
  const std::size_t last = f.lowpass.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    CHECK(f.highpass(k) == sign * f.lowpass[last - k]);
  }
  double sum = 0.0;
  for (std::size_t k = 0; k <= last; ++k) sum += f.highpass(k);
  CHECK(std::abs(sum) < 1e-14);
}

TEST_CASE("unknown filter names list what is available") {
  try {
    (void)load_filter("coif3");
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("coif3") != std::string::npos);
    CHECK(msg.find("sym10") != std::string::npos);
    CHECK(msg.find("haar") != std::string::npos);
  }
}

TEST_CASE("validate_filter rejects a perturbed table") {
  auto f = load_filter("db2");
  f.lowpass[1] += 1e-9;
  CHECK_THROWS(validate_filter(f));
  CHECK_NOTHROW(validate_filter(f, 1e-6));
}
