// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "spkaug/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spkaug/error.hpp"

namespace spkaug {

namespace {
constexpr double kLogFloor = 1e-10;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<std::vector<double>> mel_filterbank(std::size_t num_filters,
                                                std::size_t fft_size,
                                                int sample_rate_hz,
                                                double fmin_hz,
                                                double fmax_hz) {
  if (num_filters == 0) throw Error("mel_filterbank: need at least one filter");
  if (!(fmin_hz >= 0.0 && fmin_hz < fmax_hz))
    throw Error("mel_filterbank: need 0 <= fmin < fmax");
  const std::size_t bins = fft_size / 2 + 1;
  std::vector<double> edges(num_filters + 2);
  const double mel_lo = hz_to_mel(fmin_hz), mel_hi = hz_to_mel(fmax_hz);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      (num_filters + 1));

  std::vector<std::vector<double>> bank(num_filters,
                                        std::vector<double>(bins, 0.0));
  for (std::size_t f = 0; f < num_filters; ++f) {
    const double left = edges[f], center = edges[f + 1], right = edges[f + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double hz =
          static_cast<double>(k) * sample_rate_hz / static_cast<double>(fft_size);
      const double up = (hz - left) / (center - left);
      const double down = (right - hz) / (right - center);
      bank[f][k] = std::max(0.0, std::min(up, down));
    }
  }
  return bank;
}

std::vector<std::vector<double>> dct2_matrix(std::size_t n) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t j = 0; j < n; ++j)
      m[k][j] = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                 (2.0 * static_cast<double>(j) + 1.0) /
                                 (2.0 * static_cast<double>(n)));
  }
  return m;
}

std::vector<std::vector<double>> mfcc_frames(const AudioBuffer& buffer,
                                             const StftParams& params,
                                             std::size_t num_filters,
                                             std::size_t first,
                                             std::size_t count,
                                             double fmin_hz, double fmax_hz) {
  if (first + count > num_filters)
    throw Error("mfcc_frames: requested coefficients exceed filter count");
  const Spectrogram spec = stft(buffer, params);
  const auto bank = mel_filterbank(num_filters, params.fft_size,
                                   buffer.sample_rate_hz, fmin_hz, fmax_hz);
  const auto dct = dct2_matrix(num_filters);
  const std::size_t nb = spec.bins();

  std::vector<std::vector<double>> out(spec.num_frames,
                                       std::vector<double>(count, 0.0));
  std::vector<double> power(nb), log_mel(num_filters);
  for (std::size_t m = 0; m < spec.num_frames; ++m) {
    for (std::size_t k = 0; k < nb; ++k) power[k] = std::norm(spec.at(m, k));
    for (std::size_t f = 0; f < num_filters; ++f) {
      double e = 0.0;
      for (std::size_t k = 0; k < nb; ++k) e += bank[f][k] * power[k];
      log_mel[f] = std::log(e + kLogFloor);
    }
    for (std::size_t c = 0; c < count; ++c) {
      double acc = 0.0;
      for (std::size_t f = 0; f < num_filters; ++f)
        acc += dct[first + c][f] * log_mel[f];
      out[m][c] = acc;
    }
  }
  return out;
}

}  // namespace spkaug
