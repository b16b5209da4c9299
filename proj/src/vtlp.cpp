// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "spkaug/vtlp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spkaug/error.hpp"

namespace spkaug {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Warp formula without range checks; total on the real line so that the
// instantaneous-frequency path below is exact for alpha == 1.
double warp_raw(double f, const WarpParams& p) {
  if (f <= p.f0_hz) return p.alpha * f;
  const double slope =
      (p.fmax_hz - p.alpha * p.f0_hz) / (p.fmax_hz - p.f0_hz);
  return slope * (f - p.f0_hz) + p.alpha * p.f0_hz;
}

// Frequency-map invariants only; the STFT geometry is irrelevant to the pure
// warp functions and is checked by WarpParams::validate().
void check_map_params(const WarpParams& p) {
  if (!(p.alpha > 0.0)) throw Error("WarpParams: alpha must be positive");
  if (!(p.f0_hz > 0.0 && p.f0_hz < p.fmax_hz))
    throw Error("WarpParams: need 0 < f0 < fmax");
  if (!(p.alpha * p.f0_hz < p.fmax_hz))
    throw Error("WarpParams: alpha*f0 must stay below fmax for the warp "
                "to remain monotone (alpha=" +
                std::to_string(p.alpha) + ", f0=" + std::to_string(p.f0_hz) +
                ", fmax=" + std::to_string(p.fmax_hz) + ")");
}

double wrap_pi(double x) { return std::remainder(x, kTwoPi); }

}  // namespace

void WarpParams::validate() const {
  check_map_params(*this);
  stft.validate();
}

double warp_frequency(double f_hz, const WarpParams& params) {
  check_map_params(params);
  if (!(f_hz >= 0.0 && f_hz <= params.fmax_hz))
    throw Error("warp_frequency: f " + std::to_string(f_hz) +
                " outside [0, fmax]");
  return warp_raw(f_hz, params);
}

double inverse_warp_frequency(double fp_hz, const WarpParams& params) {
  check_map_params(params);
  if (!(fp_hz >= 0.0 && fp_hz <= params.fmax_hz))
    throw Error("inverse_warp_frequency: f' " + std::to_string(fp_hz) +
                " outside [0, fmax]");
  if (fp_hz <= params.alpha * params.f0_hz) return fp_hz / params.alpha;
  const double slope =
      (params.fmax_hz - params.alpha * params.f0_hz) /
      (params.fmax_hz - params.f0_hz);
  return params.f0_hz + (fp_hz - params.alpha * params.f0_hz) / slope;
}

AudioBuffer vtlp_perturb(const AudioBuffer& buffer, const WarpParams& params) {
  params.validate();
  if (buffer.empty()) throw Error("vtlp_perturb: empty buffer");
  const double nyquist = buffer.sample_rate_hz / 2.0;
  if (std::abs(nyquist - params.fmax_hz) > 1e-6)
    throw Error("vtlp_perturb: sample rate " +
                std::to_string(buffer.sample_rate_hz) +
                " does not match 2*fmax = " +
                std::to_string(2.0 * params.fmax_hz));

  Spectrogram spec = stft(buffer, params.stft);
  const std::size_t nb = spec.bins();
  const std::size_t nfft = params.stft.fft_size;
  const std::size_t hop = params.stft.hop;
  const double sr = buffer.sample_rate_hz;
  const double center = params.stft.frame_len / 2.0;

  // Per-bin geometry of the backward map: every output bin pulls from the
  // inverse-warped source frequency, so each bin is always defined.
  std::vector<double> src_pos(nb), nu_out(nb), nu_src(nb);
  std::vector<std::size_t> lo(nb), hi(nb), nearest(nb);
  std::vector<double> frac(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const double f_out = spec.bin_hz(k);
    const double f_src = inverse_warp_frequency(
        std::min(f_out, params.fmax_hz), params);
    src_pos[k] = f_src * nfft / sr;
    nu_out[k] = kTwoPi * static_cast<double>(k) / nfft;
    nu_src[k] = kTwoPi * src_pos[k] / nfft;
    lo[k] = static_cast<std::size_t>(
        std::clamp(std::floor(src_pos[k]), 0.0, static_cast<double>(nb - 1)));
    hi[k] = std::min(lo[k] + 1, nb - 1);
    frac[k] = src_pos[k] - std::floor(src_pos[k]);
    nearest[k] = static_cast<std::size_t>(
        std::clamp<long long>(std::llround(src_pos[k]), 0,
                              static_cast<long long>(nb - 1)));
  }

  Spectrogram out = spec;
  std::vector<double> phase(nb, 0.0);
  std::vector<double> prev_arg(nb, 0.0);

  // Frame 0: backward-mapped linear interpolation of the complex spectrum,
  // rotated to the window center so the interpolation does not straddle the
  // analysis window's phase ramp.
  {
    for (std::size_t k = 0; k < nb; ++k) {
      const std::complex<double> rot_a =
          std::polar(1.0, nu_out[lo[k]] * center);
      const std::complex<double> rot_b =
          std::polar(1.0, nu_out[hi[k]] * center);
      const std::complex<double> z =
          (1.0 - frac[k]) * spec.at(0, lo[k]) * rot_a +
          frac[k] * spec.at(0, hi[k]) * rot_b;
      const std::complex<double> y = z * std::polar(1.0, -nu_src[k] * center);
      out.at(0, k) = y;
      phase[k] = std::arg(y);
    }
    for (std::size_t k = 0; k < nb; ++k) prev_arg[k] = std::arg(spec.at(0, k));
  }

  // Later frames: interpolate magnitudes at the warped position and advance
  // phases by the warped instantaneous frequency, keeping frames coherent
  // after the warp (alpha == 1 reproduces the source frames exactly).
  std::vector<double> cur_arg(nb);
  for (std::size_t m = 1; m < spec.num_frames; ++m) {
    for (std::size_t k = 0; k < nb; ++k) cur_arg[k] = std::arg(spec.at(m, k));
    for (std::size_t k = 0; k < nb; ++k) {
      const double mag = (1.0 - frac[k]) * std::abs(spec.at(m, lo[k])) +
                         frac[k] * std::abs(spec.at(m, hi[k]));
      const std::size_t j = nearest[k];
      const double dphi = cur_arg[j] - prev_arg[j];
      const double nu_bin = kTwoPi * static_cast<double>(j) / nfft;
      const double nu_hat =
          nu_bin + wrap_pi(dphi - nu_bin * static_cast<double>(hop)) / hop;
      const double f_hat = nu_hat * sr / kTwoPi;
      const double advance =
          kTwoPi * warp_raw(f_hat, params) / sr * static_cast<double>(hop);
      phase[k] += advance;
      out.at(m, k) = std::polar(mag, phase[k]);
    }
    std::swap(cur_arg, prev_arg);
  }

  // DC and Nyquist are fixed points of the warp; keep them verbatim (and real).
  for (std::size_t m = 0; m < spec.num_frames; ++m) {
    out.at(m, 0) = spec.at(m, 0);
    out.at(m, nb - 1) = spec.at(m, nb - 1);
  }

  AudioBuffer result = istft(out);
  // length contract: VTLP never changes duration
  result.samples.resize(buffer.size());
  return result;
}

}  // namespace spkaug
