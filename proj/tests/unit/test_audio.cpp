// Copyright 2026  The reverbgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "reverbgen/acoustic_params.hpp"
#include "reverbgen/audio.hpp"
#include "reverbgen/resample.hpp"
#include "reverbgen/wav_io.hpp"
#include "support.hpp"

using namespace reverbgen;
using reverbgen::testing::ScopedTempDir;

namespace {

std::vector<float> ToVector(std::span<const float> s) { return {s.begin(), s.end()}; }

AudioErrorKind LoadErrorKind(const std::filesystem::path& p) {
  try {
    LoadWav(p);
  } catch (const AudioError& e) {
    return e.kind();
  }
  FAIL("LoadWav did not throw");
  return AudioErrorKind::kInvalidBuffer;
}

}  // namespace

TEST_CASE("AudioBuffer rejects invalid contents") {
  CHECK_THROWS_AS(AudioBuffer({}, 16000), AudioError);
  CHECK_THROWS_AS(AudioBuffer({0.0f}, 0), AudioError);
  CHECK_THROWS_AS(AudioBuffer({NAN}, 16000), AudioError);
  CHECK_THROWS_AS(AudioBuffer({INFINITY}, 16000), AudioError);
  AudioBuffer b({0.1f, 0.2f}, 8000);
  CHECK(b.size() == 2);
  CHECK(b.duration_seconds() == doctest::Approx(2.0 / 8000));
}

TEST_CASE("load 16-bit PCM scales by 1/32768") {
  ScopedTempDir dir;
  const std::int16_t pcm[] = {0, 16384, -32768};
  testing::WritePcm16Wav(dir / "a.wav", 8000, 1, pcm);
  const AudioBuffer b = LoadWav(dir / "a.wav");
  CHECK(b.sample_rate() == 8000);
  CHECK(ToVector(b.samples()) == std::vector<float>{0.0f, 0.5f, -1.0f});
}

TEST_CASE("load 32-bit float passes samples through") {
  ScopedTempDir dir;
  const float v[] = {0.25f};
  testing::WriteFloatWav(dir / "f.wav", 16000, 1, v);
  const AudioBuffer b = LoadWav(dir / "f.wav");
  CHECK(b.sample_rate() == 16000);
  CHECK(ToVector(b.samples()) == std::vector<float>{0.25f});

  testing::WriteFloatWav(dir / "x.wav", 16000, 1, v, /*extensible=*/true);
  CHECK(ToVector(LoadWav(dir / "x.wav").samples()) == std::vector<float>{0.25f});
}

TEST_CASE("multichannel files return channel 0") {
  ScopedTempDir dir;
  const float frames[] = {0.1f, -0.9f, 0.2f, -0.8f, 0.3f, -0.7f};
  testing::WriteFloatWav(dir / "s.wav", 22050, 2, frames);
  const AudioBuffer b = LoadWav(dir / "s.wav");
  CHECK(b.size() == 3);
  CHECK(ToVector(b.samples()) == std::vector<float>{0.1f, 0.2f, 0.3f});

  const std::int16_t pcm[] = {100, -1, 200, -2, 300, -3};
  testing::WritePcm16Wav(dir / "p.wav", 8000, 3, pcm);
  const AudioBuffer p = LoadWav(dir / "p.wav");
  CHECK(p.size() == 2);
  CHECK(p.samples()[0] == 100.0f / 32768.0f);
  CHECK(p.samples()[1] == -2.0f / 32768.0f);
}

TEST_CASE("load errors are distinguishable") {
  ScopedTempDir dir;
  CHECK(LoadErrorKind(dir / "missing.wav") == AudioErrorKind::kFileNotFound);

  { std::ofstream(dir / "junk.wav") << "definitely not a wave file"; }
  CHECK(LoadErrorKind(dir / "junk.wav") == AudioErrorKind::kMalformedHeader);

  {
    // Valid RIFF layout, 8-bit PCM payload.
    std::ofstream os(dir / "u8.wav", std::ios::binary);
    const unsigned char hdr[] = {'R', 'I', 'F', 'F', 37, 0, 0, 0, 'W', 'A', 'V', 'E',
                                 'f', 'm', 't', ' ', 16, 0, 0, 0, 1, 0, 1, 0,
                                 0x40, 0x1F, 0, 0, 0x40, 0x1F, 0, 0, 1, 0, 8, 0,
                                 'd', 'a', 't', 'a', 1, 0, 0, 0, 128};
    os.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
  }
  CHECK(LoadErrorKind(dir / "u8.wav") == AudioErrorKind::kUnsupportedEncoding);
}

TEST_CASE("save/load round-trip is bit-exact") {
  ScopedTempDir dir;
  const AudioBuffer small({0.0f, 0.5f, -1.0f}, 16000);
  SaveWav(small, dir / "s.wav");
  CHECK(ToVector(LoadWav(dir / "s.wav").samples()) == ToVector(small.samples()));
  CHECK(std::filesystem::file_size(dir / "s.wav") == 44 + 3 * 4);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(16384);
  for (auto& x : v) x = u(rng);
  SaveWav(AudioBuffer(v, 16000), dir / "r.wav");
  const AudioBuffer back = LoadWav(dir / "r.wav");
  REQUIRE(back.size() == v.size());
  CHECK(std::memcmp(back.samples().data(), v.data(), v.size() * sizeof(float)) == 0);
  CHECK(back.sample_rate() == 16000);
}

TEST_CASE("saving an empty buffer fails and writes nothing") {
  ScopedTempDir dir;
  CHECK_THROWS_AS(SaveWav(std::span<const float>{}, 16000, dir / "e.wav"), AudioError);
  CHECK_FALSE(std::filesystem::exists(dir / "e.wav"));
  CHECK_THROWS_AS(SaveWav(AudioBuffer({1.0f}, 16000), dir / "no" / "such" / "dir.wav"),
                  AudioError);
}

TEST_CASE("resample identity when rates match") {
  std::vector<float> v = {0.3f, -0.2f, 0.9f, 0.0f, 0.1f};
  const AudioBuffer out = Resample(AudioBuffer(v, 44100), 44100);
  CHECK(ToVector(out.samples()) == v);
  CHECK(out.sample_rate() == 44100);
}

TEST_CASE("resampled sine matches the analytic target") {
  constexpr double f = 1000.0;
  std::vector<float> v(4800);
  for (std::size_t n = 0; n < v.size(); ++n)
    v[n] = static_cast<float>(std::sin(2 * std::numbers::pi * f * n / 48000.0));
  const AudioBuffer out = Resample(AudioBuffer(v, 48000), 16000);
  REQUIRE(out.size() == 1600);
  CHECK(out.sample_rate() == 16000);
  // Skip the filter's edge transients.
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t n = 64; n < 1600 - 64; ++n) {
    const double ref = std::sin(2 * std::numbers::pi * f * n / 16000.0);
    sxy += ref * out.samples()[n];
    sxx += ref * ref;
    syy += static_cast<double>(out.samples()[n]) * out.samples()[n];
  }
  CHECK(sxy / std::sqrt(sxx * syy) > 0.999);
}

TEST_CASE("rate pairs with many phases resample correctly") {
  // 44100 -> 16001 has 16001 distinct phases: taps are computed per sample.
  constexpr double f = 1000.0;
  std::vector<float> v(4410);
  for (std::size_t n = 0; n < v.size(); ++n)
    v[n] = static_cast<float>(std::sin(2 * std::numbers::pi * f * n / 44100.0));
  const AudioBuffer out = Resample(AudioBuffer(v, 44100), 16001);
  REQUIRE(out.size() == 1600);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t n = 64; n < out.size() - 64; ++n) {
    const double ref = std::sin(2 * std::numbers::pi * f * n / 16001.0);
    sxy += ref * out.samples()[n];
    sxx += ref * ref;
    syy += static_cast<double>(out.samples()[n]) * out.samples()[n];
  }
  CHECK(sxy / std::sqrt(sxx * syy) > 0.999);
}

TEST_CASE("resampling preserves DC") {
  const AudioBuffer out = Resample(AudioBuffer(std::vector<float>(3200, 0.5f), 32000), 16000);
  REQUIRE(out.size() == 1600);
  for (std::size_t n = 64; n < 1600 - 64; ++n) REQUIRE(std::abs(out.samples()[n] - 0.5f) < 1e-3f);
}

// Buffers are never empty, so a length that rounds to zero becomes one.
TEST_CASE("resample output length is round(n * ratio)") {
  for (int n : {1, 7, 441, 1000, 1234}) {
    for (int src : {8000, 22050, 44100, 48000}) {
      const AudioBuffer out = Resample(AudioBuffer(std::vector<float>(n, 0.1f), src), 16000);
      CHECK(out.size() == std::max<std::size_t>(1, std::llround(n * 16000.0 / src)));
    }
  }
}

TEST_CASE("to_rir normalizes, truncates and pads") {
  std::vector<float> v(16384, 0.0f);
  v[10] = 0.5f;
  v[11] = -0.25f;
  const Rir r = ToRir(AudioBuffer(v, 16000));
  CHECK(r.samples()[10] == 1.0f);
  CHECK(r.samples()[11] == -0.5f);
  CHECK(PeakAbs(r.samples()) == 1.0f);

  std::vector<float> longer(20000);
  for (std::size_t i = 0; i < longer.size(); ++i) longer[i] = std::cos(0.01f * i);
  const Rir t = ToRir(AudioBuffer(longer, 16000));
  REQUIRE(t.samples().size() == kRirLength);
  for (std::size_t i = 0; i < kRirLength; i += 97) CHECK(t.samples()[i] == longer[i]);

  std::vector<float> shorter(8000, 0.0f);
  shorter[0] = -2.0f;
  shorter[7999] = 1.0f;
  const Rir p = ToRir(AudioBuffer(shorter, 16000));
  REQUIRE(p.samples().size() == kRirLength);
  CHECK(p.samples()[0] == -1.0f);
  CHECK(p.samples()[7999] == 0.5f);
  for (std::size_t i = 8000; i < kRirLength; ++i) REQUIRE(p.samples()[i] == 0.0f);
}

TEST_CASE("to_rir resamples to 16 kHz first") {
  std::vector<float> v(48000 / 2, 0.0f);
  v[300] = 1.0f;
  const Rir r = ToRir(AudioBuffer(v, 48000));
  CHECK(PeakIndex(r.samples()) == 100);
}

TEST_CASE("to_rir rejects an all-zero buffer") {
  try {
    ToRir(AudioBuffer(std::vector<float>(100, 0.0f), 16000));
    FAIL("expected throw");
  } catch (const AudioError& e) {
    CHECK(e.kind() == AudioErrorKind::kZeroSignal);
  }
  CHECK_THROWS_AS(Rir::FromSamples(std::vector<float>(100, 1.0f)), AudioError);
}

TEST_CASE("to_rir is idempotent") {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> g;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<float> v(12000 + 3000 * trial);
    for (auto& x : v) x = 0.3f * g(rng);
    const Rir once = ToRir(AudioBuffer(v, 16000));
    const Rir twice = ToRir(once.ToBuffer());
    for (std::size_t i = 0; i < kRirLength; ++i)
      REQUIRE(std::abs(once.samples()[i] - twice.samples()[i]) < 1e-7f);
  }
}
