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

#ifndef REVERBGEN_WAV_IO_HPP_
#define REVERBGEN_WAV_IO_HPP_

#include <filesystem>

#include "reverbgen/audio.hpp"

namespace reverbgen {

// RIFF/WAVE reader. Accepts 16-bit integer PCM and 32-bit IEEE float, plain
// or WAVE_FORMAT_EXTENSIBLE, any channel count; returns channel 0. Integer
// PCM is scaled by 1/32768.
AudioBuffer LoadWav(const std::filesystem::path& path);

// Writes mono 32-bit IEEE float with the canonical 44-byte header.
void SaveWav(const AudioBuffer& buffer, const std::filesystem::path& path);
void SaveWav(std::span<const float> samples, int sample_rate,
             const std::filesystem::path& path);

}  // namespace reverbgen

#endif  // REVERBGEN_WAV_IO_HPP_
