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

#ifndef REVERBGEN_RESAMPLE_HPP_
#define REVERBGEN_RESAMPLE_HPP_

#include "reverbgen/audio.hpp"

namespace reverbgen {

struct ResamplerOptions {
  double kaiser_beta = 8.6;
  // Zero crossings of the low-pass sinc kept on each side of the centre tap.
  int half_zero_crossings = 32;
  // Cutoff as a fraction of the lower Nyquist frequency.
  double rolloff = 0.95;
};

/// Band-limited windowed-sinc resampling. Output length is
/// round(n * target_rate / source_rate). Identity when the rates match.
AudioBuffer Resample(const AudioBuffer& buffer, int target_rate,
                     const ResamplerOptions& options = {});

}  // namespace reverbgen

#endif  // REVERBGEN_RESAMPLE_HPP_
