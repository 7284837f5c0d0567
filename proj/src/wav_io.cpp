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

#include "reverbgen/wav_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace reverbgen {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T ReadLe(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void WriteLe(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

[[noreturn]] void Malformed(const std::filesystem::path& path,
                            const std::string& why) {
  throw AudioError(AudioErrorKind::kMalformedHeader,
                   path.string() + ": " + why);
}

}  // namespace

AudioBuffer LoadWav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw AudioError(AudioErrorKind::kFileNotFound,
                     "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    Malformed(path, "not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = ReadLe<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size())
        Malformed(path, "truncated fmt chunk");
      format = ReadLe<std::uint16_t>(chunk + 8);
      channels = ReadLe<std::uint16_t>(chunk + 10);
      sample_rate = ReadLe<std::uint32_t>(chunk + 12);
      block_align = ReadLe<std::uint16_t>(chunk + 20);
      bits = ReadLe<std::uint16_t>(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40) Malformed(path, "truncated extensible fmt chunk");
        // First two bytes of the SubFormat GUID carry the actual format tag.
        format = ReadLe<std::uint16_t>(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      // Tolerate writers that leave a placeholder size on a streamed file.
      data_size = std::min<std::size_t>(size, bytes.size() - body);
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) Malformed(path, "missing fmt chunk");
  if (data == nullptr) Malformed(path, "missing data chunk");
  if (channels == 0 || sample_rate == 0 || block_align == 0)
    Malformed(path, "zero channels, rate, or block alignment");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32)
    throw AudioError(AudioErrorKind::kUnsupportedEncoding,
                     path.string() + ": format tag " + std::to_string(format) +
                         " with " + std::to_string(bits) + " bits per sample");
  if (block_align != channels * (bits / 8))
    Malformed(path, "block alignment does not match channel layout");

  const std::size_t frames = data_size / block_align;
  std::vector<float> samples(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* frame = data + i * block_align;
    samples[i] = pcm16 ? ReadLe<std::int16_t>(frame) / 32768.0f
                       : ReadLe<float>(frame);
  }
  if (samples.empty()) Malformed(path, "no audio frames");
  return AudioBuffer(std::move(samples), static_cast<int>(sample_rate));
}

void SaveWav(std::span<const float> samples, int sample_rate,
             const std::filesystem::path& path) {
  // Validates before anything touches the filesystem.
  const AudioBuffer checked(std::vector<float>(samples.begin(), samples.end()),
                            sample_rate);
  SaveWav(checked, path);
}

void SaveWav(const AudioBuffer& buffer, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw AudioError(AudioErrorKind::kWriteFailed,
                     "cannot open " + path.string() + " for writing");
  const auto data_bytes =
      static_cast<std::uint32_t>(buffer.size() * sizeof(float));
  os.write("RIFF", 4);
  WriteLe<std::uint32_t>(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  WriteLe<std::uint32_t>(os, 16);
  WriteLe<std::uint16_t>(os, kFormatFloat);
  WriteLe<std::uint16_t>(os, 1);
  WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(buffer.sample_rate()));
  WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(buffer.sample_rate()) * 4);
  WriteLe<std::uint16_t>(os, 4);
  WriteLe<std::uint16_t>(os, 32);
  os.write("data", 4);
  WriteLe<std::uint32_t>(os, data_bytes);
  os.write(reinterpret_cast<const char*>(buffer.samples().data()), data_bytes);
  if (!os)
    throw AudioError(AudioErrorKind::kWriteFailed,
                     "write failed for " + path.string());
}

}  // namespace reverbgen
