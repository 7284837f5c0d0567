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

#ifndef REVERBGEN_AUDIO_HPP_
#define REVERBGEN_AUDIO_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace reverbgen {

/// Canonical RIR geometry: 16384 samples at 16 kHz (just over one second).
inline constexpr std::size_t kRirLength = 16384;
inline constexpr int kRirSampleRate = 16000;

enum class AudioErrorKind {
  kInvalidBuffer,       // empty, non-finite, or bad sample rate
  kFileNotFound,
  kMalformedHeader,
  kUnsupportedEncoding,
  kWriteFailed,
  kZeroSignal,          // cannot peak-normalize
  kRateMismatch,
};

class AudioError : public std::runtime_error {
 public:
  AudioError(AudioErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  AudioErrorKind kind() const noexcept { return kind_; }

 private:
  AudioErrorKind kind_;
};

/// Mono audio with its sample rate. Never empty; every sample finite.
class AudioBuffer {
 public:
  AudioBuffer(std::vector<float> samples, int sample_rate);

  std::span<const float> samples() const noexcept { return samples_; }
  int sample_rate() const noexcept { return sample_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double duration_seconds() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

  /// Moves the sample storage out; the buffer must not be used afterwards.
  std::vector<float> release() && { return std::move(samples_); }

 private:
  std::vector<float> samples_;
  int sample_rate_;
};

/// A canonical room impulse response: exactly kRirLength samples at
/// kRirSampleRate, peak-normalized to max |h| == 1.
class Rir {
 public:
  /// Peak-normalizes `samples`, which must already have kRirLength entries.
  static Rir FromSamples(std::vector<float> samples);

  std::span<const float> samples() const noexcept { return samples_; }
  static constexpr int sample_rate() noexcept { return kRirSampleRate; }
  static constexpr std::size_t size() noexcept { return kRirLength; }

  AudioBuffer ToBuffer() const { return AudioBuffer(samples_, kRirSampleRate); }

  friend bool operator==(const Rir&, const Rir&) = default;

 private:
  explicit Rir(std::vector<float> samples) : samples_(std::move(samples)) {}
  std::vector<float> samples_;
};

/// Resample to 16 kHz, truncate or zero-pad the tail to 16384 samples, and
/// peak-normalize. Throws AudioError(kZeroSignal) for an all-zero result.
Rir ToRir(const AudioBuffer& buffer);

/// Largest absolute sample value.
float PeakAbs(std::span<const float> x) noexcept;

}  // namespace reverbgen

#endif  // REVERBGEN_AUDIO_HPP_
