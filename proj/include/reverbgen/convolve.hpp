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

#ifndef REVERBGEN_CONVOLVE_HPP_
#define REVERBGEN_CONVOLVE_HPP_

#include <span>
#include <vector>

#include "reverbgen/audio.hpp"

namespace reverbgen {

/// Full linear convolution, length len(x) + len(h) - 1.
///
/// Dense kernels go through a zero-padded real FFT (next power of two,
/// double precision). When the number of nonzero kernel taps is small enough
/// that direct summation over them is cheaper, that path is taken instead;
/// it is exact for unit impulses and scaled deltas.
std::vector<float> Convolve(std::span<const float> x, std::span<const float> h);

/// Convolves two buffers at the same sample rate.
AudioBuffer Convolve(const AudioBuffer& x, const AudioBuffer& h);
AudioBuffer Convolve(const AudioBuffer& x, const Rir& h);

/// FFT-only route, exposed for tests and benchmarks.
std::vector<float> ConvolveFft(std::span<const float> x, std::span<const float> h);

}  // namespace reverbgen

#endif  // REVERBGEN_CONVOLVE_HPP_
