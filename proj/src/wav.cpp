// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "spkaug/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "spkaug/dsp.hpp"
#include "spkaug/error.hpp"

namespace spkaug {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

struct ChunkHeader {
  char id[4];
  std::uint32_t size;
};

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u16(std::ofstream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

void write_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

struct ParsedWav {
  WavInfo info;
  std::uint16_t bits_per_sample = 0;
  std::vector<unsigned char> payload;  // raw data chunk (empty if skip_data)
};

ParsedWav parse_wav(const std::string& path, bool skip_data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_wav: cannot open " + path);

  unsigned char riff[12];
  if (!in.read(reinterpret_cast<char*>(riff), 12))
    throw Error("read_wav: " + path + ": truncated RIFF header");
  if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(riff + 8, "WAVE", 4) != 0)
    throw Error("read_wav: " + path + ": not a RIFF/WAVE file");

  ParsedWav wav;
  bool have_fmt = false;
  std::uint16_t block_align = 0;
  while (true) {
    unsigned char hdr[8];
    if (!in.read(reinterpret_cast<char*>(hdr), 8)) break;
    const std::uint32_t size = read_u32(hdr + 4);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16) throw Error("read_wav: " + path + ": corrupt fmt chunk");
      std::vector<unsigned char> fmt(size);
      if (!in.read(reinterpret_cast<char*>(fmt.data()), size))
        throw Error("read_wav: " + path + ": truncated fmt chunk");
      wav.info.format_code = read_u16(fmt.data());
      wav.info.channels = read_u16(fmt.data() + 2);
      wav.info.sample_rate_hz = read_u32(fmt.data() + 4);
      block_align = read_u16(fmt.data() + 12);
      wav.bits_per_sample = read_u16(fmt.data() + 14);
      have_fmt = true;
      if (size & 1) in.seekg(1, std::ios::cur);
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!have_fmt)
        throw Error("read_wav: " + path + ": data chunk before fmt chunk");
      if (block_align == 0)
        throw Error("read_wav: " + path + ": corrupt header (block align 0)");
      wav.info.num_samples = size / block_align;
      if (skip_data) return wav;
      wav.payload.resize(size);
      if (!in.read(reinterpret_cast<char*>(wav.payload.data()), size))
        throw Error("read_wav: " + path + ": truncated data chunk");
      return wav;
    } else {
      // skip unknown chunk (word-aligned)
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  throw Error("read_wav: " + path + ": no data chunk found");
}

}  // namespace

WavInfo read_wav_info(const std::string& path) {
  return parse_wav(path, /*skip_data=*/true).info;
}

AudioBuffer read_wav(const std::string& path, int target_rate_hz) {
  if (target_rate_hz <= 0) throw Error("read_wav: target rate must be positive");
  ParsedWav wav = parse_wav(path, /*skip_data=*/false);

  if (wav.info.channels != 1)
    throw Error("read_wav: " + path + ": unsupported channel count " +
                std::to_string(wav.info.channels) + " (mono only, no downmix)");
  if (wav.info.sample_rate_hz == 0)
    throw Error("read_wav: " + path + ": corrupt header (rate 0)");

  AudioBuffer buf;
  buf.sample_rate_hz = static_cast<int>(wav.info.sample_rate_hz);
  if (wav.info.format_code == kFormatPcm && wav.bits_per_sample == 16) {
    const std::size_t n = wav.payload.size() / 2;
    buf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(read_u16(&wav.payload[2 * i]));
      buf.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (wav.info.format_code == kFormatFloat && wav.bits_per_sample == 32) {
    const std::size_t n = wav.payload.size() / 4;
    buf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t bits = read_u32(&wav.payload[4 * i]);
      float f;
      std::memcpy(&f, &bits, 4);
      buf.samples[i] = static_cast<double>(f);
    }
  } else {
    throw Error("read_wav: " + path + ": unsupported encoding (format code " +
                std::to_string(wav.info.format_code) + ", " +
                std::to_string(wav.bits_per_sample) + " bits)");
  }

  if (buf.empty()) throw Error("read_wav: " + path + ": empty data chunk");
  if (buf.sample_rate_hz != target_rate_hz) {
    const double ratio =
        static_cast<double>(target_rate_hz) / buf.sample_rate_hz;
    buf = resample_sinc(buf, ratio);
    buf.sample_rate_hz = target_rate_hz;
  }
  return buf;
}

void write_wav(const AudioBuffer& buffer, const std::string& path,
               WavEncoding encoding) {
  if (buffer.empty()) throw Error("write_wav: empty buffer");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("write_wav: cannot open " + path + " for writing");

  const bool pcm16 = encoding == WavEncoding::kPcm16;
  const std::uint16_t bytes_per_sample = pcm16 ? 2 : 4;
  const auto n = static_cast<std::uint32_t>(buffer.size());
  const std::uint32_t data_bytes = n * bytes_per_sample;

  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, pcm16 ? kFormatPcm : kFormatFloat);
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<std::uint32_t>(buffer.sample_rate_hz));
  write_u32(out, static_cast<std::uint32_t>(buffer.sample_rate_hz) *
                     bytes_per_sample);
  write_u16(out, bytes_per_sample);
  write_u16(out, static_cast<std::uint16_t>(bytes_per_sample * 8));
  out.write("data", 4);
  write_u32(out, data_bytes);

  if (pcm16) {
    for (double v : buffer.samples) {
      const double clipped = std::clamp(v, -1.0, 1.0);
      // round half away from zero, then clamp 32768 -> 32767
      auto q = static_cast<std::int64_t>(std::llround(clipped * 32768.0));
      q = std::clamp<std::int64_t>(q, -32768, 32767);
      write_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
  } else {
    for (double v : buffer.samples) {
      const auto f = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      write_u32(out, bits);
    }
  }
  if (!out) throw Error("write_wav: short write to " + path);
}

}  // namespace spkaug
