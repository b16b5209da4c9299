// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <vector>

#include "spkaug/audio.hpp"
#include "spkaug/dsp.hpp"

namespace spkaug {

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular mel filter bank over rfft bins; rows are filters.
/// Filter centers are spaced uniformly on the mel scale between fmin and fmax.
std::vector<std::vector<double>> mel_filterbank(std::size_t num_filters,
                                                std::size_t fft_size,
                                                int sample_rate_hz,
                                                double fmin_hz, double fmax_hz);

/// Orthonormal DCT-II matrix (n x n).
std::vector<std::vector<double>> dct2_matrix(std::size_t n);

/// Mel-cepstral coefficients per frame: power spectrum -> mel energies ->
/// log -> DCT-II, keeping coefficients [first, first+count).
/// Returns a frames x count matrix.
std::vector<std::vector<double>> mfcc_frames(const AudioBuffer& buffer,
                                             const StftParams& params,
                                             std::size_t num_filters,
                                             std::size_t first,
                                             std::size_t count,
                                             double fmin_hz, double fmax_hz);

}  // namespace spkaug
