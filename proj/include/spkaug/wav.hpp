// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "spkaug/audio.hpp"

namespace spkaug {

enum class WavEncoding {
  kPcm16,    // format code 1, 16-bit little-endian
  kFloat32,  // format code 3, IEEE float little-endian
};

/// Reads a mono RIFF/WAVE file (16-bit integer PCM or 32-bit float PCM) and
/// resamples to target_rate_hz when the native rate differs. Integer samples
/// are scaled by 1/32768. Multichannel files are rejected, never downmixed.
AudioBuffer read_wav(const std::string& path, int target_rate_hz = 16000);

/// Writes buffer to path. pcm16 hard-clips to [-1, 1] and quantizes with
/// round-half-away-from-zero; float32 stores samples narrowed to float.
void write_wav(const AudioBuffer& buffer, const std::string& path,
               WavEncoding encoding = WavEncoding::kPcm16);

struct WavInfo {
  std::uint32_t sample_rate_hz = 0;
  std::uint64_t num_samples = 0;  // per channel
  std::uint16_t channels = 0;
  std::uint16_t format_code = 0;
};

/// Header-only probe; used for cheap idempotency checks.
WavInfo read_wav_info(const std::string& path);

}  // namespace spkaug
