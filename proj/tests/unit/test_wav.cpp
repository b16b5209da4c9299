// Copyright 2026 The spkaug Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "spkaug/error.hpp"
#include "spkaug/wav.hpp"
#include "testutil.hpp"

using namespace spkaug;

namespace {

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// minimal stereo pcm16 file for the rejection test
void write_stereo_wav(const std::string& path, std::size_t frames) {
  std::ofstream out(path, std::ios::binary);
  auto u16 = [&](std::uint16_t v) { out.put(char(v & 0xff)); out.put(char(v >> 8)); };
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(char((v >> (8 * i)) & 0xff));
  };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * 4);
  out.write("RIFF", 4);
  u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(1);
  u16(2);  // stereo
  u32(16000);
  u32(16000 * 4);
  u16(4);
  u16(16);
  out.write("data", 4);
  u32(data_bytes);
  for (std::size_t i = 0; i < frames * 2; ++i) u16(0);
}

}  // namespace

TEST_CASE("pcm16 file read back structurally identical") {
  testutil::TempDir tmp("spkaug_wav");
  const auto buf = testutil::tone(440.0, 16000);
  write_wav(buf, tmp.file("a.wav"), WavEncoding::kPcm16);
  const auto back = read_wav(tmp.file("a.wav"), 16000);
  CHECK(back.size() == 16000);
  CHECK(back.sample_rate_hz == 16000);
}

TEST_CASE("8 kHz file is resampled to 2N samples at 16 kHz target") {
  testutil::TempDir tmp("spkaug_wav");
  const std::size_t n = 5000;
  auto buf = testutil::tone(300.0, n, 8000);
  write_wav(buf, tmp.file("a.wav"), WavEncoding::kPcm16);
  const auto back = read_wav(tmp.file("a.wav"), 16000);
  CHECK(back.size() == 2 * n);
  CHECK(back.sample_rate_hz == 16000);
}

TEST_CASE("stereo input is rejected, not downmixed") {
  testutil::TempDir tmp("spkaug_wav");
  write_stereo_wav(tmp.file("stereo.wav"), 256);
  CHECK_THROWS_WITH_AS(read_wav(tmp.file("stereo.wav"), 16000),
                       doctest::Contains("unsupported channel count"), Error);
}

TEST_CASE("float32 write/read round trip is exact") {
  testutil::TempDir tmp("spkaug_wav");
  auto buf = testutil::uniform_noise(4096, 11);
  // float-representable values round-trip bit-identically
  for (auto& v : buf.samples) v = static_cast<double>(static_cast<float>(v));
  write_wav(buf, tmp.file("f.wav"), WavEncoding::kFloat32);
  const auto back = read_wav(tmp.file("f.wav"), 16000);
  REQUIRE(back.size() == buf.size());
  CHECK(testutil::max_abs_diff(back.samples, buf.samples) == 0.0);
}

TEST_CASE("pcm16 quantization: 0.5 stored as 16384") {
  testutil::TempDir tmp("spkaug_wav");
  AudioBuffer buf;
  buf.samples.assign(8, 0.5);
  write_wav(buf, tmp.file("q.wav"), WavEncoding::kPcm16);
  const auto bytes = slurp(tmp.file("q.wav"));
  REQUIRE(bytes.size() == 44 + 16);
  const auto v = static_cast<std::int16_t>(bytes[44] | (bytes[45] << 8));
  CHECK(v == 16384);
  const auto back = read_wav(tmp.file("q.wav"), 16000);
  CHECK(std::abs(back.samples[0] - 0.5) <= 1.0 / 32768);
  CHECK(back.samples[0] == 0.5);  // 16384/32768 is exact
}

TEST_CASE("pcm16 clipping: 1.5 stored as 32767") {
  testutil::TempDir tmp("spkaug_wav");
  AudioBuffer buf;
  buf.samples.assign(4, 1.5);
  write_wav(buf, tmp.file("c.wav"), WavEncoding::kPcm16);
  const auto bytes = slurp(tmp.file("c.wav"));
  const auto v = static_cast<std::int16_t>(bytes[44] | (bytes[45] << 8));
  CHECK(v == 32767);
}

TEST_CASE("pcm16 round-trip error bounded by 1/32768") {
  testutil::TempDir tmp("spkaug_wav");
  for (std::uint64_t seed : {1, 2, 3}) {
    auto buf = testutil::uniform_noise(2048, seed, 16000, 0.999);
    write_wav(buf, tmp.file("r.wav"), WavEncoding::kPcm16);
    const auto back = read_wav(tmp.file("r.wav"), 16000);
    CHECK(testutil::max_abs_diff(back.samples, buf.samples) <= 1.0 / 32768);
  }
}

TEST_CASE("read errors: missing file, corrupt header, empty write") {
  testutil::TempDir tmp("spkaug_wav");
  CHECK_THROWS_AS(read_wav(tmp.file("missing.wav"), 16000), Error);

  std::ofstream(tmp.file("bad.wav")) << "this is not a wav";
  CHECK_THROWS_AS(read_wav(tmp.file("bad.wav"), 16000), Error);

  AudioBuffer empty;
  CHECK_THROWS_AS(write_wav(empty, tmp.file("e.wav"), WavEncoding::kPcm16),
                  Error);
}

TEST_CASE("18-byte fmt chunks (cbSize present) are accepted") {
  testutil::TempDir tmp("spkaug_wav");
  std::ofstream out(tmp.file("ext.wav"), std::ios::binary);
  auto u16 = [&](std::uint16_t v) { out.put(char(v & 0xff)); out.put(char(v >> 8)); };
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(char((v >> (8 * i)) & 0xff));
  };
  const std::size_t n = 128;
  out.write("RIFF", 4);
  u32(static_cast<std::uint32_t>(4 + 8 + 18 + 8 + 2 * n));
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(18);
  u16(1);
  u16(1);
  u32(16000);
  u32(32000);
  u16(2);
  u16(16);
  u16(0);  // cbSize
  out.write("data", 4);
  u32(static_cast<std::uint32_t>(2 * n));
  for (std::size_t i = 0; i < n; ++i) u16(static_cast<std::uint16_t>(1000 + i));
  out.close();
  const auto buf = read_wav(tmp.file("ext.wav"), 16000);
  CHECK(buf.size() == n);
  CHECK(buf.samples[0] == doctest::Approx(1000.0 / 32768));
}

TEST_CASE("extra chunks are skipped") {
  testutil::TempDir tmp("spkaug_wav");
  // write a valid file, then splice a LIST chunk between fmt and data
  const auto buf = testutil::tone(100.0, 64, 16000);
  write_wav(buf, tmp.file("base.wav"), WavEncoding::kPcm16);
  auto bytes = slurp(tmp.file("base.wav"));
  std::vector<unsigned char> extra = {'L', 'I', 'S', 'T', 4, 0, 0, 0,
                                      'I', 'N', 'F', 'O'};
  bytes.insert(bytes.begin() + 36, extra.begin(), extra.end());
  const std::uint32_t riff_size = static_cast<std::uint32_t>(bytes.size() - 8);
  for (int i = 0; i < 4; ++i)
    bytes[4 + i] = static_cast<unsigned char>((riff_size >> (8 * i)) & 0xff);
  std::ofstream out(tmp.file("list.wav"), std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  const auto back = read_wav(tmp.file("list.wav"), 16000);
  CHECK(back.size() == 64);
}
