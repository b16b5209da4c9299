// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <vector>

namespace spkaug {

/// Mono PCM audio held as real amplitudes, nominally in [-1, 1].
/// The rate label travels with the samples; speed perturbation works by
/// changing the sample count while leaving the label untouched.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

double peak_abs(const AudioBuffer& buf);
double rms(const AudioBuffer& buf);

}  // namespace spkaug
