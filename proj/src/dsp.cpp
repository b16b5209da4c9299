// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "spkaug/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spkaug/error.hpp"

namespace spkaug {

namespace {

constexpr double kPi = std::numbers::pi;

// Kaiser design shared by every resample call.
constexpr double kKaiserBeta = 8.6;
constexpr int kHalfTaps = 32;  // 64 taps per polyphase branch

double bessel_i0(double x) {
  // power series; converges quickly for the argument range we use
  double sum = 1.0, term = 1.0;
  const double half_x = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half_x / k) * (half_x / k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

// Windowed-sinc tap at offset t (input samples) for the given cutoff
// (fraction of the input Nyquist).
double kernel_tap(double t, double cutoff) {
  if (std::abs(t) >= kHalfTaps) return 0.0;
  const double u = t / kHalfTaps;
  const double w = bessel_i0(kKaiserBeta * std::sqrt(1.0 - u * u)) /
                   bessel_i0(kKaiserBeta);
  return cutoff * sinc(cutoff * t) * w;
}

}  // namespace

double peak_abs(const AudioBuffer& buf) {
  double peak = 0.0;
  for (double v : buf.samples) peak = std::max(peak, std::abs(v));
  return peak;
}

double rms(const AudioBuffer& buf) {
  if (buf.empty()) return 0.0;
  double acc = 0.0;
  for (double v : buf.samples) acc += v * v;
  return std::sqrt(acc / buf.samples.size());
}

std::string Rational::str() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational rational_approx(double x, std::int64_t max_den) {
  if (!(x > 0.0)) throw Error("rational_approx: ratio must be positive");
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double a = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double floor_a = std::floor(a);
    const auto ai = static_cast<std::int64_t>(floor_a);
    const std::int64_t p2 = ai * p1 + p0;
    const std::int64_t q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(static_cast<double>(p1) / q1 - x) < 1e-12 * std::max(1.0, x))
      break;
    const double frac = a - floor_a;
    if (frac < 1e-15) break;
    a = 1.0 / frac;
  }
  if (q1 == 0) throw Error("rational_approx: no convergent found");
  return {p1, q1};
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw Error("fft: size must be a nonzero power of two");
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : a) v *= inv_n;
  }
}

std::vector<std::complex<double>> rfft(const std::vector<double>& x,
                                       std::size_t nfft) {
  std::vector<std::complex<double>> a(nfft, {0.0, 0.0});
  const std::size_t n = std::min(x.size(), nfft);
  for (std::size_t i = 0; i < n; ++i) a[i] = {x[i], 0.0};
  fft_inplace(a, false);
  a.resize(nfft / 2 + 1);
  return a;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& half,
                          std::size_t nfft) {
  if (half.size() != nfft / 2 + 1)
    throw Error("irfft: expected nfft/2+1 bins, got " +
                std::to_string(half.size()));
  std::vector<std::complex<double>> a(nfft);
  for (std::size_t k = 0; k < half.size(); ++k) a[k] = half[k];
  for (std::size_t k = 1; k + 1 < half.size(); ++k)
    a[nfft - k] = std::conj(half[k]);
  fft_inplace(a, true);
  std::vector<double> out(nfft);
  for (std::size_t i = 0; i < nfft; ++i) out[i] = a[i].real();
  return out;
}

AudioBuffer resample_sinc(const AudioBuffer& buffer, double ratio) {
  const auto out_len = static_cast<std::int64_t>(
      std::llround(static_cast<double>(buffer.size()) * ratio));
  return resample_sinc(buffer, ratio, out_len);
}

AudioBuffer resample_sinc(const AudioBuffer& buffer, double ratio,
                          std::int64_t out_len) {
  if (buffer.empty()) throw Error("resample_sinc: empty buffer");
  if (!(ratio >= 0.1 && ratio <= 10.0))
    throw Error("resample_sinc: ratio " + std::to_string(ratio) +
                " outside [0.1, 10]");
  const Rational r = rational_approx(ratio);
  const auto p = static_cast<std::size_t>(r.num);
  const auto q = static_cast<std::size_t>(r.den);
  // anti-aliasing cutoff: full band when upsampling, shrunk when decimating
  const double cutoff = std::min(1.0, r.value());

  const int taps = 2 * kHalfTaps;  // support k in [-kHalfTaps+1, kHalfTaps]
  std::vector<double> table(p * taps);
  for (std::size_t phase = 0; phase < p; ++phase) {
    const double frac = static_cast<double>(phase) / p;
    for (int k = 0; k < taps; ++k) {
      const double t = static_cast<double>(k - kHalfTaps + 1) - frac;
      table[phase * taps + k] = kernel_tap(t, cutoff);
    }
  }

  const auto n = static_cast<std::int64_t>(buffer.size());
  AudioBuffer out;
  out.sample_rate_hz = buffer.sample_rate_hz;
  out.samples.assign(static_cast<std::size_t>(std::max<std::int64_t>(out_len, 0)),
                     0.0);
  for (std::int64_t m = 0; m < out_len; ++m) {
    const auto num = static_cast<std::uint64_t>(m) * q;
    const auto base = static_cast<std::int64_t>(num / p);
    const auto phase = static_cast<std::size_t>(num % p);
    const double* tap = &table[phase * taps];
    const std::int64_t lo = base - kHalfTaps + 1;
    const std::int64_t a = std::max<std::int64_t>(lo, 0);
    const std::int64_t b = std::min<std::int64_t>(lo + taps, n);
    double acc = 0.0;
    for (std::int64_t i = a; i < b; ++i)
      acc += buffer.samples[static_cast<std::size_t>(i)] * tap[i - lo];
    out.samples[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

std::vector<double> make_window(Window window, std::size_t len) {
  std::vector<double> w(len);
  switch (window) {
    case Window::kHannPeriodic:
      for (std::size_t i = 0; i < len; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / len);
      break;
    case Window::kHamming:
      for (std::size_t i = 0; i < len; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) / len);
      break;
    case Window::kRectangular:
      std::fill(w.begin(), w.end(), 1.0);
      break;
  }
  return w;
}

void StftParams::validate() const {
  if (frame_len == 0 || hop == 0 || fft_size == 0)
    throw Error("StftParams: sizes must be positive");
  if (hop > frame_len) throw Error("StftParams: hop exceeds frame length");
  if ((fft_size & (fft_size - 1)) != 0)
    throw Error("StftParams: fft_size must be a power of two");
  if (fft_size < frame_len)
    throw Error("StftParams: fft_size smaller than frame length");

  // The synthesis path divides by the tiled squared-window sum.  Reject
  // window/hop pairs whose normalizer is degenerate, then confirm the
  // matched analysis/synthesis pair reconstructs with <= 1e-6 ripple.
  const std::vector<double> w = make_window(window, frame_len);
  std::vector<double> tiled(hop, 0.0);
  for (std::size_t j = 0; j < frame_len; ++j) tiled[j % hop] += w[j] * w[j];
  const double dmax = *std::max_element(tiled.begin(), tiled.end());
  const double dmin = *std::min_element(tiled.begin(), tiled.end());
  if (!(dmin > 1e-4 * dmax))
    throw Error("StftParams: window/hop pair cannot be inverted "
                "(overlap-add normalizer dips to zero)");
  double worst = 0.0;
  for (std::size_t i = 0; i < hop; ++i) {
    double acc = 0.0;
    for (std::size_t j = i; j < frame_len; j += hop)
      acc += w[j] * (w[j] / tiled[j % hop]);
    worst = std::max(worst, std::abs(acc - 1.0));
  }
  if (worst > 1e-6)
    throw Error("StftParams: overlap-add reconstruction ripple " +
                std::to_string(worst) + " exceeds 1e-6");
}

namespace {

// reflect padding without edge duplication; input must already be >= frame.
std::vector<double> reflect_pad(const std::vector<double>& x, std::size_t pad) {
  const std::size_t n = x.size();
  std::vector<double> out;
  out.reserve(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) out.push_back(x[pad - i]);
  out.insert(out.end(), x.begin(), x.end());
  for (std::size_t i = 0; i < pad; ++i) out.push_back(x[n - 2 - i]);
  return out;
}

}  // namespace

Spectrogram stft(const AudioBuffer& buffer, const StftParams& params) {
  params.validate();
  if (buffer.empty()) throw Error("stft: empty buffer");

  std::vector<double> x = buffer.samples;
  if (x.size() < params.frame_len) x.resize(params.frame_len, 0.0);
  const std::size_t pad = params.frame_len / 2;
  const std::vector<double> padded = reflect_pad(x, pad);
  const std::vector<double> w = make_window(params.window, params.frame_len);

  const std::size_t num_frames =
      (padded.size() - params.frame_len) / params.hop + 1;
  Spectrogram spec;
  spec.params = params;
  spec.sample_rate_hz = buffer.sample_rate_hz;
  spec.original_len = buffer.size();
  spec.num_frames = num_frames;
  spec.data.resize(num_frames * spec.bins());

  std::vector<double> frame(params.frame_len);
  for (std::size_t m = 0; m < num_frames; ++m) {
    const double* src = padded.data() + m * params.hop;
    for (std::size_t j = 0; j < params.frame_len; ++j) frame[j] = src[j] * w[j];
    const auto bins = rfft(frame, params.fft_size);
    std::copy(bins.begin(), bins.end(), spec.data.begin() + m * spec.bins());
  }
  return spec;
}

AudioBuffer istft(const Spectrogram& spec) {
  spec.params.validate();
  if (spec.data.size() != spec.num_frames * spec.bins())
    throw Error("istft: frame data does not match declared geometry");
  if (spec.num_frames == 0) throw Error("istft: empty spectrogram");

  const StftParams& p = spec.params;
  const std::vector<double> w = make_window(p.window, p.frame_len);
  const std::size_t total = (spec.num_frames - 1) * p.hop + p.frame_len;
  std::vector<double> acc(total, 0.0);
  std::vector<double> norm(total, 0.0);

  std::vector<std::complex<double>> half(spec.bins());
  for (std::size_t m = 0; m < spec.num_frames; ++m) {
    std::copy(spec.data.begin() + m * spec.bins(),
              spec.data.begin() + (m + 1) * spec.bins(), half.begin());
    const std::vector<double> frame = irfft(half, p.fft_size);
    const std::size_t off = m * p.hop;
    for (std::size_t j = 0; j < p.frame_len; ++j) {
      acc[off + j] += frame[j] * w[j];
      norm[off + j] += w[j] * w[j];
    }
  }

  const std::size_t pad = p.frame_len / 2;
  AudioBuffer out;
  out.sample_rate_hz = spec.sample_rate_hz;
  out.samples.resize(spec.original_len);
  for (std::size_t i = 0; i < spec.original_len; ++i) {
    const std::size_t j = i + pad;
    out.samples[i] = acc[j] / std::max(norm[j], 1e-12);
  }
  return out;
}

double dominant_frequency(const AudioBuffer& buffer) {
  if (buffer.size() < 1024)
    throw Error("dominant_frequency: buffer too short (need >= 1024 samples)");
  const std::size_t n = buffer.size();
  std::vector<double> windowed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / n);
    windowed[i] = buffer.samples[i] * w;
  }
  const std::size_t nfft = next_pow2(n);
  const auto bins = rfft(windowed, nfft);
  std::size_t peak = 0;
  double peak_mag = -1.0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double mag = std::abs(bins[k]);
    if (mag > peak_mag) {
      peak_mag = mag;
      peak = k;
    }
  }
  double pos = static_cast<double>(peak);
  if (peak > 0 && peak + 1 < bins.size()) {
    const double eps = 1e-300;
    const double a = std::log(std::abs(bins[peak - 1]) + eps);
    const double b = std::log(std::abs(bins[peak]) + eps);
    const double c = std::log(std::abs(bins[peak + 1]) + eps);
    const double denom = a - 2.0 * b + c;
    if (std::abs(denom) > 1e-30) {
      double delta = 0.5 * (a - c) / denom;
      delta = std::clamp(delta, -0.5, 0.5);
      pos += delta;
    }
  }
  return pos * buffer.sample_rate_hz / static_cast<double>(nfft);
}

}  // namespace spkaug
