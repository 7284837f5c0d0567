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

#include "reverbgen/audio.hpp"

#include <algorithm>
#include <cmath>

#include "reverbgen/resample.hpp"

namespace reverbgen {

AudioBuffer::AudioBuffer(std::vector<float> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (samples_.empty())
    throw AudioError(AudioErrorKind::kInvalidBuffer, "audio buffer is empty");
  if (sample_rate_ <= 0)
    throw AudioError(AudioErrorKind::kInvalidBuffer,
                     "sample rate must be positive, got " +
                         std::to_string(sample_rate_));
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i]))
      throw AudioError(AudioErrorKind::kInvalidBuffer,
                       "non-finite sample at index " + std::to_string(i));
  }
}

float PeakAbs(std::span<const float> x) noexcept {
  float peak = 0.0f;
  for (float v : x) peak = std::max(peak, std::abs(v));
  return peak;
}

Rir Rir::FromSamples(std::vector<float> samples) {
  if (samples.size() != kRirLength)
    throw AudioError(AudioErrorKind::kInvalidBuffer,
                     "RIR must have " + std::to_string(kRirLength) +
                         " samples, got " + std::to_string(samples.size()));
  for (float v : samples) {
    if (!std::isfinite(v))
      throw AudioError(AudioErrorKind::kInvalidBuffer, "non-finite RIR sample");
  }
  const float peak = PeakAbs(samples);
  if (peak == 0.0f)
    throw AudioError(AudioErrorKind::kZeroSignal,
                     "cannot peak-normalize an all-zero RIR");
  if (peak != 1.0f) {
    for (float& v : samples) v /= peak;
  }
  return Rir(std::move(samples));
}

Rir ToRir(const AudioBuffer& buffer) {
  std::vector<float> samples =
      buffer.sample_rate() == kRirSampleRate
          ? std::vector<float>(buffer.samples().begin(), buffer.samples().end())
          : Resample(buffer, kRirSampleRate).release();
  samples.resize(kRirLength, 0.0f);
  return Rir::FromSamples(std::move(samples));
}

}  // namespace reverbgen
