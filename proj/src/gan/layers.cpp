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

#include "reverbgen/gan/layers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace reverbgen::gan {
namespace {

// Tap k touches long index s*j + (k - pad) = s*(j + q) + r.
struct Tap {
  int phase;  // r in [0, s)
  int shift;  // q
  int begin;  // valid j range [begin, end)
  int end;
};

Tap MakeTap(const ConvGeometry& g, int k, int short_len) {
  const int offset = k - g.pad;
  int q = offset / g.stride;
  int r = offset % g.stride;
  if (r < 0) {
    r += g.stride;
    --q;
  }
  return {r, q, std::max(0, -q), std::min(short_len, short_len - q)};
}

// Split rows of length s*L into s phase rows of length L:
// out[(c*s + r)*L + j] = in[c*s*L + s*j + r].
template <typename T>
void ToPhases(std::span<const T> in, int channels, int stride, int short_len,
              std::vector<T>& out) {
  out.resize(static_cast<std::size_t>(channels) * stride * short_len);
  for (int c = 0; c < channels; ++c) {
    const T* src = in.data() + static_cast<std::ptrdiff_t>(c) * stride * short_len;
    for (int r = 0; r < stride; ++r) {
      T* dst = out.data() + (static_cast<std::ptrdiff_t>(c) * stride + r) * short_len;
      for (int j = 0; j < short_len; ++j) dst[j] = src[stride * j + r];
    }
  }
}

// Inverse of ToPhases, accumulating into `out`.
template <typename T>
void AddFromPhases(const std::vector<T>& in, int channels, int stride,
                   int short_len, std::span<T> out) {
  for (int c = 0; c < channels; ++c) {
    T* dst = out.data() + static_cast<std::ptrdiff_t>(c) * stride * short_len;
    for (int r = 0; r < stride; ++r) {
      const T* src = in.data() + (static_cast<std::ptrdiff_t>(c) * stride + r) * short_len;
      for (int j = 0; j < short_len; ++j) dst[stride * j + r] += src[j];
    }
  }
}

template <typename T>
const T* Ones(int n) {
  thread_local std::vector<T> ones;
  if (ones.size() < static_cast<std::size_t>(n)) ones.assign(n, T(1));
  return ones.data();
}

template <typename T>
std::vector<T>& Scratch(int slot) {
  thread_local std::vector<T> buffers[2];
  return buffers[slot];
}

// Dot product with eight interleaved partial sums. The fixed lane layout lets
// the compiler vectorize without -ffast-math while keeping the summation
// order, and therefore the result, independent of the build's SIMD width.
template <typename T>
T Dot(const T* a, const T* b, int n) {
  T lanes[8] = {};
  int j = 0;
  for (; j + 8 <= n; j += 8)
    for (int l = 0; l < 8; ++l) lanes[l] += a[j + l] * b[j + l];
  for (int l = 0; j < n; ++j, ++l) lanes[l] += a[j] * b[j];
  return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) +
         ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7]));
}

template <typename T>
const T* PhaseRow(const std::vector<T>& phases, int channel, int stride,
                  int phase, int short_len) {
  return phases.data() +
         (static_cast<std::ptrdiff_t>(channel) * stride + phase) * short_len;
}

}  // namespace

int ReflectIndex(int i, int length) {
  if (length == 1) return 0;
  if (i < 0) return -i;
  if (i >= length) return 2 * (length - 1) - i;
  return i;
}

template <typename T>
void ConvForward(const ConvGeometry& g, int short_len, std::span<const T> x,
                 std::span<const T> w, std::span<const T> b, std::span<T> y) {
  assert(x.size() == static_cast<std::size_t>(g.in_channels) * g.stride * short_len);
  assert(y.size() == static_cast<std::size_t>(g.out_channels) * short_len);
  auto& xp = Scratch<T>(0);
  ToPhases(x, g.in_channels, g.stride, short_len, xp);
  for (int co = 0; co < g.out_channels; ++co) {
    T* yrow = y.data() + static_cast<std::ptrdiff_t>(co) * short_len;
    std::fill(yrow, yrow + short_len, b[co]);
    for (int ci = 0; ci < g.in_channels; ++ci) {
      const T* wrow = w.data() + (static_cast<std::ptrdiff_t>(co) * g.in_channels + ci) * g.kernel;
      for (int k = 0; k < g.kernel; ++k) {
        const Tap tap = MakeTap(g, k, short_len);
        const T* src = PhaseRow(xp, ci, g.stride, tap.phase, short_len) + tap.shift;
        const T wk = wrow[k];
        for (int j = tap.begin; j < tap.end; ++j) yrow[j] += wk * src[j];
      }
    }
  }
}

template <typename T>
void ConvBackward(const ConvGeometry& g, int short_len, std::span<const T> x,
                  std::span<const T> w, std::span<const T> grad_y,
                  std::span<T> grad_x, std::span<T> grad_w, std::span<T> grad_b) {
  auto& xp = Scratch<T>(0);
  auto& gxp = Scratch<T>(1);
  ToPhases(x, g.in_channels, g.stride, short_len, xp);
  const bool want_input = !grad_x.empty();
  const bool want_weights = !grad_w.empty();
  const bool want_bias = !grad_b.empty();
  if (want_input)
    gxp.assign(static_cast<std::size_t>(g.in_channels) * g.stride * short_len, T(0));

  for (int co = 0; co < g.out_channels; ++co) {
    const T* gy = grad_y.data() + static_cast<std::ptrdiff_t>(co) * short_len;
    if (want_bias) grad_b[co] += Dot(gy, Ones<T>(short_len), short_len);
    for (int ci = 0; ci < g.in_channels; ++ci) {
      const std::ptrdiff_t wbase = (static_cast<std::ptrdiff_t>(co) * g.in_channels + ci) * g.kernel;
      for (int k = 0; k < g.kernel; ++k) {
        const Tap tap = MakeTap(g, k, short_len);
        const T* src = PhaseRow(xp, ci, g.stride, tap.phase, short_len) + tap.shift;
        if (want_weights)
          grad_w[wbase + k] += Dot(gy + tap.begin, src + tap.begin, tap.end - tap.begin);
        if (want_input) {
          T* dst = gxp.data() +
                   (static_cast<std::ptrdiff_t>(ci) * g.stride + tap.phase) * short_len + tap.shift;
          const T wk = w[wbase + k];
          for (int j = tap.begin; j < tap.end; ++j) dst[j] += wk * gy[j];
        }
      }
    }
  }
  if (want_input) AddFromPhases(gxp, g.in_channels, g.stride, short_len, grad_x);
}

template <typename T>
void ConvTransposeForward(const ConvGeometry& g, int short_len,
                          std::span<const T> x, std::span<const T> w,
                          std::span<const T> b, std::span<T> y) {
  assert(x.size() == static_cast<std::size_t>(g.in_channels) * short_len);
  assert(y.size() == static_cast<std::size_t>(g.out_channels) * g.stride * short_len);
  auto& yp = Scratch<T>(1);
  yp.assign(static_cast<std::size_t>(g.out_channels) * g.stride * short_len, T(0));
  for (int ci = 0; ci < g.in_channels; ++ci) {
    const T* xrow = x.data() + static_cast<std::ptrdiff_t>(ci) * short_len;
    for (int co = 0; co < g.out_channels; ++co) {
      const T* wrow = w.data() + (static_cast<std::ptrdiff_t>(ci) * g.out_channels + co) * g.kernel;
      for (int k = 0; k < g.kernel; ++k) {
        const Tap tap = MakeTap(g, k, short_len);
        T* dst = yp.data() +
                 (static_cast<std::ptrdiff_t>(co) * g.stride + tap.phase) * short_len + tap.shift;
        const T wk = wrow[k];
        for (int j = tap.begin; j < tap.end; ++j) dst[j] += wk * xrow[j];
      }
    }
  }
  const std::ptrdiff_t long_len = static_cast<std::ptrdiff_t>(g.stride) * short_len;
  for (int co = 0; co < g.out_channels; ++co)
    std::fill(y.begin() + co * long_len, y.begin() + (co + 1) * long_len, b[co]);
  AddFromPhases(yp, g.out_channels, g.stride, short_len, y);
}

template <typename T>
void ConvTransposeBackward(const ConvGeometry& g, int short_len,
                           std::span<const T> x, std::span<const T> w,
                           std::span<const T> grad_y, std::span<T> grad_x,
                           std::span<T> grad_w, std::span<T> grad_b) {
  auto& gyp = Scratch<T>(0);
  ToPhases(grad_y, g.out_channels, g.stride, short_len, gyp);
  const std::ptrdiff_t long_len = static_cast<std::ptrdiff_t>(g.stride) * short_len;
  const bool want_input = !grad_x.empty();
  const bool want_weights = !grad_w.empty();
  if (!grad_b.empty()) {
    const T* ones = Ones<T>(static_cast<int>(long_len));
    for (int co = 0; co < g.out_channels; ++co)
      grad_b[co] += Dot(grad_y.data() + co * long_len, ones, static_cast<int>(long_len));
  }
  for (int ci = 0; ci < g.in_channels; ++ci) {
    const T* xrow = x.data() + static_cast<std::ptrdiff_t>(ci) * short_len;
    T* gxrow = want_input ? grad_x.data() + static_cast<std::ptrdiff_t>(ci) * short_len : nullptr;
    for (int co = 0; co < g.out_channels; ++co) {
      const std::ptrdiff_t wbase = (static_cast<std::ptrdiff_t>(ci) * g.out_channels + co) * g.kernel;
      for (int k = 0; k < g.kernel; ++k) {
        const Tap tap = MakeTap(g, k, short_len);
        const T* src = PhaseRow(gyp, co, g.stride, tap.phase, short_len) + tap.shift;
        if (want_weights)
          grad_w[wbase + k] += Dot(xrow + tap.begin, src + tap.begin, tap.end - tap.begin);
        if (want_input) {
          const T wk = w[wbase + k];
          for (int j = tap.begin; j < tap.end; ++j) gxrow[j] += wk * src[j];
        }
      }
    }
  }
}

template <typename T>
void DenseForward(int in, int out, std::span<const T> x, std::span<const T> w,
                  std::span<const T> b, std::span<T> y) {
  for (int o = 0; o < out; ++o) {
    const T* row = w.data() + static_cast<std::ptrdiff_t>(o) * in;
    y[o] = b[o] + Dot(row, x.data(), in);
  }
}

template <typename T>
void DenseBackward(int in, int out, std::span<const T> x, std::span<const T> w,
                   std::span<const T> grad_y, std::span<T> grad_x,
                   std::span<T> grad_w, std::span<T> grad_b) {
  const bool want_input = !grad_x.empty();
  const bool want_weights = !grad_w.empty();
  for (int o = 0; o < out; ++o) {
    const T gy = grad_y[o];
    if (!grad_b.empty()) grad_b[o] += gy;
    if (want_weights) {
      T* grow = grad_w.data() + static_cast<std::ptrdiff_t>(o) * in;
      for (int i = 0; i < in; ++i) grow[i] += gy * x[i];
    }
    if (want_input) {
      const T* row = w.data() + static_cast<std::ptrdiff_t>(o) * in;
      for (int i = 0; i < in; ++i) grad_x[i] += gy * row[i];
    }
  }
}

template <typename T>
void ReluInPlace(std::span<T> x) {
  for (T& v : x) v = v > T(0) ? v : T(0);
}

template <typename T>
void ReluBackward(std::span<const T> out, std::span<T> grad) {
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!(out[i] > T(0))) grad[i] = T(0);
}

template <typename T>
void LeakyReluInPlace(std::span<T> x) {
  const T slope = static_cast<T>(kLeakySlope);
  for (T& v : x) v = v > T(0) ? v : slope * v;
}

template <typename T>
void LeakyReluBackward(std::span<const T> out, std::span<T> grad) {
  const T slope = static_cast<T>(kLeakySlope);
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!(out[i] > T(0))) grad[i] *= slope;
}

template <typename T>
void TanhInPlace(std::span<T> x) {
  for (T& v : x) v = std::tanh(v);
}

template <typename T>
void TanhBackward(std::span<const T> out, std::span<T> grad) {
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= T(1) - out[i] * out[i];
}

template <typename T>
void PhaseShuffleForward(int channels, int length, int shift,
                         std::span<const T> x, std::span<T> y) {
  for (int c = 0; c < channels; ++c) {
    const T* src = x.data() + static_cast<std::ptrdiff_t>(c) * length;
    T* dst = y.data() + static_cast<std::ptrdiff_t>(c) * length;
    for (int t = 0; t < length; ++t) dst[t] = src[ReflectIndex(t - shift, length)];
  }
}

template <typename T>
void PhaseShuffleBackward(int channels, int length, int shift,
                          std::span<const T> grad_y, std::span<T> grad_x) {
  for (int c = 0; c < channels; ++c) {
    const T* src = grad_y.data() + static_cast<std::ptrdiff_t>(c) * length;
    T* dst = grad_x.data() + static_cast<std::ptrdiff_t>(c) * length;
    for (int t = 0; t < length; ++t) dst[ReflectIndex(t - shift, length)] += src[t];
  }
}

#define REVERBGEN_INSTANTIATE_LAYERS(T)                                              \
  template void ConvForward<T>(const ConvGeometry&, int, std::span<const T>,         \
                               std::span<const T>, std::span<const T>, std::span<T>); \
  template void ConvBackward<T>(const ConvGeometry&, int, std::span<const T>,        \
                                std::span<const T>, std::span<const T>, std::span<T>, \
                                std::span<T>, std::span<T>);                          \
  template void ConvTransposeForward<T>(const ConvGeometry&, int, std::span<const T>, \
                                        std::span<const T>, std::span<const T>,       \
                                        std::span<T>);                                \
  template void ConvTransposeBackward<T>(const ConvGeometry&, int, std::span<const T>, \
                                         std::span<const T>, std::span<const T>,       \
                                         std::span<T>, std::span<T>, std::span<T>);    \
  template void DenseForward<T>(int, int, std::span<const T>, std::span<const T>,      \
                                std::span<const T>, std::span<T>);                     \
  template void DenseBackward<T>(int, int, std::span<const T>, std::span<const T>,     \
                                 std::span<const T>, std::span<T>, std::span<T>,       \
                                 std::span<T>);                                        \
  template void ReluInPlace<T>(std::span<T>);                                         \
  template void ReluBackward<T>(std::span<const T>, std::span<T>);                    \
  template void LeakyReluInPlace<T>(std::span<T>);                                    \
  template void LeakyReluBackward<T>(std::span<const T>, std::span<T>);               \
  template void TanhInPlace<T>(std::span<T>);                                         \
  template void TanhBackward<T>(std::span<const T>, std::span<T>);                    \
  template void PhaseShuffleForward<T>(int, int, int, std::span<const T>, std::span<T>); \
  template void PhaseShuffleBackward<T>(int, int, int, std::span<const T>, std::span<T>);

REVERBGEN_INSTANTIATE_LAYERS(float)
REVERBGEN_INSTANTIATE_LAYERS(double)

#undef REVERBGEN_INSTANTIATE_LAYERS

}  // namespace reverbgen::gan
