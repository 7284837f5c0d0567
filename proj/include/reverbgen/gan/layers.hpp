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

// Forward/backward kernels for the 1-D convolutional GAN. All activations
// are channel-major: row c of a [channels x length] tensor is contiguous.
// Backward kernels accumulate into gradient buffers (+=); an empty gradient
// span skips that output.

#ifndef REVERBGEN_GAN_LAYERS_HPP_
#define REVERBGEN_GAN_LAYERS_HPP_

#include <span>
#include <vector>

namespace reverbgen::gan {

/// Strided 1-D convolution geometry. The "long" side has stride * short_len
/// samples; a convolution maps long -> short and the transposed convolution
/// short -> long, sharing the tap convention
///   long index = stride * short index + k - pad.
struct ConvGeometry {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 25;
  int stride = 4;
  int pad = 10;

  int weight_count() const { return in_channels * out_channels * kernel; }
};

// y[co][o] = b[co] + sum_ci sum_k W[co][ci][k] x[ci][s*o + k - pad]
// x: [in x s*short_len], W: [out][in][K], y: [out x short_len]
template <typename T>
void ConvForward(const ConvGeometry& g, int short_len, std::span<const T> x,
                 std::span<const T> w, std::span<const T> b, std::span<T> y);

template <typename T>
void ConvBackward(const ConvGeometry& g, int short_len, std::span<const T> x,
                  std::span<const T> w, std::span<const T> grad_y,
                  std::span<T> grad_x, std::span<T> grad_w, std::span<T> grad_b);

// y[co][s*i + k - pad] += W[ci][co][k] x[ci][i], plus bias.
// x: [in x short_len], W: [in][out][K], y: [out x s*short_len]
template <typename T>
void ConvTransposeForward(const ConvGeometry& g, int short_len,
                          std::span<const T> x, std::span<const T> w,
                          std::span<const T> b, std::span<T> y);

template <typename T>
void ConvTransposeBackward(const ConvGeometry& g, int short_len,
                           std::span<const T> x, std::span<const T> w,
                           std::span<const T> grad_y, std::span<T> grad_x,
                           std::span<T> grad_w, std::span<T> grad_b);

// y = W x + b, W: [out][in].
template <typename T>
void DenseForward(int in, int out, std::span<const T> x, std::span<const T> w,
                  std::span<const T> b, std::span<T> y);

template <typename T>
void DenseBackward(int in, int out, std::span<const T> x, std::span<const T> w,
                   std::span<const T> grad_y, std::span<T> grad_x,
                   std::span<T> grad_w, std::span<T> grad_b);

// Activations work in place; their backward passes use the forward *output*.
template <typename T>
void ReluInPlace(std::span<T> x);
template <typename T>
void ReluBackward(std::span<const T> out, std::span<T> grad);

inline constexpr double kLeakySlope = 0.2;
template <typename T>
void LeakyReluInPlace(std::span<T> x);
template <typename T>
void LeakyReluBackward(std::span<const T> out, std::span<T> grad);

template <typename T>
void TanhInPlace(std::span<T> x);
template <typename T>
void TanhBackward(std::span<const T> out, std::span<T> grad);

/// Shifts every channel by `shift` samples, filling vacated samples by
/// reflection about the edge sample: y[c][t] = x[c][reflect(t - shift)].
template <typename T>
void PhaseShuffleForward(int channels, int length, int shift,
                         std::span<const T> x, std::span<T> y);
template <typename T>
void PhaseShuffleBackward(int channels, int length, int shift,
                          std::span<const T> grad_y, std::span<T> grad_x);

/// Reflection index used by phase shuffle; valid for |i| < 2 * length - 1.
int ReflectIndex(int i, int length);

}  // namespace reverbgen::gan

#endif  // REVERBGEN_GAN_LAYERS_HPP_
