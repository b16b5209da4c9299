// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>

#include "spkaug/error.hpp"
#include "spkaug/speed_perturb.hpp"
#include "testutil.hpp"

using namespace spkaug;

TEST_CASE("alpha = 1 is the identity") {
  const auto x = testutil::uniform_noise(12000, 42);
  const auto y = speed_perturb(x, {1.0, true});
  REQUIRE(y.size() == x.size());
  CHECK(testutil::max_abs_diff(y.samples, x.samples) <= 1e-6);
}

TEST_CASE("alpha = 0.8 stretches 16000 samples to 20000") {
  const auto x = testutil::uniform_noise(16000, 1);
  const auto y = speed_perturb(x, {0.8, true});
  CHECK(y.size() == 20000);
  CHECK(y.sample_rate_hz == x.sample_rate_hz);
}

TEST_CASE("440 Hz tone at alpha 1.1 lands at 484 Hz") {
  const auto x = testutil::tone(440.0, 16000);
  const auto y = speed_perturb(x, {1.1, true});
  const double bin = 16000.0 / next_pow2(y.size());
  CHECK(std::abs(dominant_frequency(y) - 484.0) <= bin);
}

TEST_CASE("strict range guards alpha") {
  const auto x = testutil::tone(440.0, 4000);
  CHECK_THROWS_WITH_AS(speed_perturb(x, {1.5, true}),
                       doctest::Contains("no-distortion range"), Error);
  CHECK_THROWS_AS(speed_perturb(x, {0.0, false}), Error);
  CHECK_THROWS_AS(speed_perturb(x, {-0.5, false}), Error);
  // research escape hatch
  const auto y = speed_perturb(x, {1.5, false});
  CHECK(y.size() == static_cast<std::size_t>(std::llround(4000 / 1.5)));
}

TEST_CASE("duration contract across alphas and lengths") {
  for (std::size_t n : {std::size_t{400}, std::size_t{16000},
                        std::size_t{32000}, std::size_t{100001}}) {
    const auto x = testutil::uniform_noise(n, n + 9);
    for (double a : {0.8, 0.85, 0.9, 1.05, 1.18, 1.2}) {
      const auto y = speed_perturb(x, {a, true});
      const auto expect = static_cast<std::size_t>(
          std::llround(static_cast<double>(n) / a));
      CHECK(y.size() == expect);
    }
  }
}

TEST_CASE("pitch contract: output tone at alpha * f") {
  for (double f : {440.0, 1000.0, 3000.0, 3500.0}) {
    for (double a : {0.8, 0.9, 1.1, 1.2}) {
      const auto x = testutil::tone(f, 16000);
      const auto y = speed_perturb(x, {a, true});
      const double bin = 16000.0 / next_pow2(y.size());
      CHECK(std::abs(dominant_frequency(y) - a * f) <= bin);
    }
  }
}

TEST_CASE("approximate invertibility via the realized rational ratio") {
  // band-limited multi-tone below 3 kHz
  auto x = testutil::tone(250.0, 32000, 16000, 0.3);
  for (double f : {700.0, 1300.0, 2200.0, 2900.0}) {
    const auto t = testutil::tone(f, 32000, 16000, 0.15, f);
    for (std::size_t i = 0; i < x.size(); ++i) x.samples[i] += t.samples[i];
  }
  for (double a : {0.8, 0.9, 1.1, 1.2}) {
    const auto y = speed_perturb(x, {a, true});
    const Rational r = realized_ratio(a);  // y len factor = r
    const double alpha_realized = static_cast<double>(r.den) / r.num;
    // the inverse factor leaves [0.8, 1.2] for the endpoints (1/0.8 = 1.25),
    // which is exactly what strict_range=false is for
    const auto z = speed_perturb(y, {1.0 / alpha_realized, false});
    CHECK(testutil::ncc(x.samples, z.samples) >= 0.95);
  }
}

TEST_CASE("peak never grows by more than the sinc overshoot bound") {
  auto x = testutil::tone(1000.0, 16000, 16000, 0.9);
  const auto n = testutil::uniform_noise(16000, 8, 16000, 0.05);
  for (std::size_t i = 0; i < x.size(); ++i) x.samples[i] += n.samples[i];
  const double in_peak = peak_abs(x);
  for (double a : {0.8, 0.9, 1.1, 1.2}) {
    const auto y = speed_perturb(x, {a, true});
    CHECK(peak_abs(y) <= in_peak * 1.03);
  }
}

TEST_CASE("realized ratio is reported as an exact fraction") {
  CHECK(realized_ratio(0.9).str() == "10/9");
  CHECK(realized_ratio(1.25).str() == "4/5");
  CHECK(realized_ratio(1.0).str() == "1/1");
}
