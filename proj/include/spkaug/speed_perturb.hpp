// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "spkaug/audio.hpp"
#include "spkaug/dsp.hpp"

namespace spkaug {

/// Perturbation factor for speed perturbation. alpha > 1 plays faster
/// (shorter output, spectrum stretched up); alpha < 1 slower.
struct SpeedSpec {
  double alpha = 1.0;
  // Listening tests find audible distortion outside [0.8, 1.2]; the flag
  // exists for research use beyond that range.
  bool strict_range = true;

  void validate() const;
};

/// y(t) = x(alpha * t), realized as windowed-sinc resampling by 1/alpha.
/// Output length is round(input_len / alpha); the sample-rate label is
/// unchanged, so all spectral content scales by alpha.
AudioBuffer speed_perturb(const AudioBuffer& buffer, const SpeedSpec& spec);

/// The rational resampling factor actually realized for a given alpha
/// (output/input length). Recorded in augmentation reports so runs are
/// exactly reproducible.
Rational realized_ratio(double alpha);

}  // namespace spkaug
