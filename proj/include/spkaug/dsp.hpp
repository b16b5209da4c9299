// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "spkaug/audio.hpp"

namespace spkaug {

// ---------------------------------------------------------------------------
// Rational ratio handling for the resampler.
// ---------------------------------------------------------------------------

struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / den; }
  std::string str() const;
};

/// Best continued-fraction convergent p/q of x with q <= max_den.
Rational rational_approx(double x, std::int64_t max_den = 1000);

// ---------------------------------------------------------------------------
// FFT (iterative radix-2; sizes must be powers of two).
// ---------------------------------------------------------------------------

std::size_t next_pow2(std::size_t n);

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

/// Real-input FFT, zero-padded to nfft; returns nfft/2+1 bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& x,
                                       std::size_t nfft);

/// Inverse of rfft under Hermitian symmetry; returns nfft real samples.
std::vector<double> irfft(const std::vector<std::complex<double>>& half,
                          std::size_t nfft);

// ---------------------------------------------------------------------------
// Resampling.
// ---------------------------------------------------------------------------

/// Kaiser-windowed-sinc polyphase resampling at a rational approximation of
/// `ratio` (output length factor). The sample-rate label is left unchanged:
/// resampling under a fixed label is exactly what makes it a speed change.
/// Output length is round(input_len * ratio), half away from zero.
AudioBuffer resample_sinc(const AudioBuffer& buffer, double ratio);

/// Same, with the output length pinned by the caller.
AudioBuffer resample_sinc(const AudioBuffer& buffer, double ratio,
                          std::int64_t out_len);

// ---------------------------------------------------------------------------
// STFT / ISTFT.
// ---------------------------------------------------------------------------

enum class Window {
  kHannPeriodic,
  kHamming,
  kRectangular,
};

std::vector<double> make_window(Window window, std::size_t len);

struct StftParams {
  std::size_t frame_len = 400;  // 25 ms @ 16 kHz
  std::size_t hop = 160;        // 10 ms
  std::size_t fft_size = 512;
  Window window = Window::kHannPeriodic;

  std::size_t bins() const { return fft_size / 2 + 1; }

  /// Throws on invalid geometry or a window/hop pair that cannot support
  /// exact weighted-overlap-add reconstruction.
  void validate() const;
};

/// Complex STFT frames, one row per frame, fft_size/2+1 bins each.
/// Bin k of a buffer at rate sr sits at k * sr / fft_size Hz.
struct Spectrogram {
  StftParams params;
  int sample_rate_hz = 16000;
  std::size_t original_len = 0;  // for exact-length inversion
  std::size_t num_frames = 0;
  std::vector<std::complex<double>> data;  // row-major num_frames x bins

  std::size_t bins() const { return params.bins(); }
  std::complex<double>& at(std::size_t frame, std::size_t bin) {
    return data[frame * bins() + bin];
  }
  const std::complex<double>& at(std::size_t frame, std::size_t bin) const {
    return data[frame * bins() + bin];
  }
  double bin_hz(std::size_t bin) const {
    return static_cast<double>(bin) * sample_rate_hz / params.fft_size;
  }
};

/// Analysis with reflect padding of frame_len/2 at both edges; inputs shorter
/// than one frame are zero-padded to exactly one frame first.
Spectrogram stft(const AudioBuffer& buffer, const StftParams& params = {});

/// Weighted overlap-add synthesis, normalized by the accumulated squared
/// window, trimmed back to original_len samples.
AudioBuffer istft(const Spectrogram& spec);

// ---------------------------------------------------------------------------
// Measurement.
// ---------------------------------------------------------------------------

/// Peak frequency of a single Hann-windowed full-length FFT (zero-padded to
/// the next power of two), refined by parabolic interpolation over the peak
/// and its neighbors. Requires >= 1024 samples.
double dominant_frequency(const AudioBuffer& buffer);

}  // namespace spkaug
