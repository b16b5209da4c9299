// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "spkaug/speed_perturb.hpp"

#include <cmath>
#include <string>

#include "spkaug/error.hpp"

namespace spkaug {

namespace {
constexpr double kRangeLo = 0.8;
constexpr double kRangeHi = 1.2;
constexpr double kRangeEps = 1e-9;
}  // namespace

void SpeedSpec::validate() const {
  if (!(alpha > 0.0))
    throw Error("SpeedSpec: alpha must be positive, got " +
                std::to_string(alpha));
  if (strict_range &&
      (alpha < kRangeLo - kRangeEps || alpha > kRangeHi + kRangeEps))
    throw Error("SpeedSpec: alpha " + std::to_string(alpha) +
                " outside the no-distortion range [0.8, 1.2]; pass "
                "strict_range=false to override");
}

AudioBuffer speed_perturb(const AudioBuffer& buffer, const SpeedSpec& spec) {
  spec.validate();
  if (buffer.empty()) throw Error("speed_perturb: empty buffer");
  const auto out_len = static_cast<std::int64_t>(
      std::llround(static_cast<double>(buffer.size()) / spec.alpha));
  return resample_sinc(buffer, 1.0 / spec.alpha, out_len);
}

Rational realized_ratio(double alpha) {
  if (!(alpha > 0.0)) throw Error("realized_ratio: alpha must be positive");
  return rational_approx(1.0 / alpha);
}

}  // namespace spkaug
