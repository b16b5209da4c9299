// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "spkaug/audio.hpp"
#include "spkaug/dsp.hpp"

namespace spkaug {

/// Piecewise-linear frequency warp parameters. The warp scales [0, f0] by
/// alpha and maps (f0, fmax] linearly onto (alpha*f0, fmax], keeping fmax
/// fixed. Requires alpha*f0 < fmax so the warp stays monotone.
struct WarpParams {
  double alpha = 1.0;
  double f0_hz = 4800.0;
  double fmax_hz = 8000.0;
  // VTLP's analysis geometry is a free choice; the dense 5 ms hop keeps
  // instantaneous-frequency estimates unambiguous across the whole Hann
  // mainlobe (sr/(2*hop) = 100 Hz >= 80 Hz lobe half-width).
  StftParams stft = {400, 80, 512, Window::kHannPeriodic};

  void validate() const;
};

/// f' per the two-segment warp; valid for f in [0, fmax].
double warp_frequency(double f_hz, const WarpParams& params);

/// Analytic inverse; warp_frequency(inverse_warp_frequency(fp)) == fp
/// within 1e-9 Hz.
double inverse_warp_frequency(double fp_hz, const WarpParams& params);

/// Applies the warp in the STFT domain and resynthesizes a waveform of
/// exactly the input length. Duration-preserving, in contrast with speed
/// perturbation. Requires buffer.sample_rate_hz == 2 * fmax_hz.
AudioBuffer vtlp_perturb(const AudioBuffer& buffer, const WarpParams& params);

}  // namespace spkaug
