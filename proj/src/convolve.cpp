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

#include "reverbgen/convolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace reverbgen {
namespace {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
template <typename T>
using FftwPtr = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwPtr<T> FftwAlloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwPtr<T>(p);
}

// FFTW planning is not thread-safe; plans are created once per size under a
// lock and then executed through the new-array interface, which is.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

PlanPair PlansFor(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto real = FftwAlloc<double>(n);
  auto spec = FftwAlloc<fftw_complex>(n / 2 + 1);
  const int size = static_cast<int>(n);
  PlanPair plans;
  plans.forward = fftw_plan_dft_r2c_1d(size, real.get(), spec.get(), FFTW_ESTIMATE);
  plans.inverse = fftw_plan_dft_c2r_1d(size, spec.get(), real.get(), FFTW_ESTIMATE);
  cache.emplace(n, plans);
  return plans;
}

std::vector<float> ConvolveSparse(std::span<const float> x,
                                  std::span<const float> h) {
  std::vector<double> acc(x.size() + h.size() - 1, 0.0);
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double tap = h[k];
    if (tap == 0.0) continue;
    double* dst = acc.data() + k;
    for (std::size_t i = 0; i < x.size(); ++i) dst[i] += tap * x[i];
  }
  return std::vector<float>(acc.begin(), acc.end());
}

void CheckNonEmpty(std::span<const float> x, std::span<const float> h) {
  if (x.empty() || h.empty())
    throw AudioError(AudioErrorKind::kInvalidBuffer,
                     "convolution operands must be non-empty");
}

}  // namespace

std::vector<float> ConvolveFft(std::span<const float> x,
                               std::span<const float> h) {
  CheckNonEmpty(x, h);
  const std::size_t out_len = x.size() + h.size() - 1;
  const std::size_t n = std::bit_ceil(out_len);
  const std::size_t bins = n / 2 + 1;
  const PlanPair plans = PlansFor(n);

  auto a = FftwAlloc<double>(n);
  auto b = FftwAlloc<double>(n);
  auto fa = FftwAlloc<fftw_complex>(bins);
  auto fb = FftwAlloc<fftw_complex>(bins);
  std::fill(a.get(), a.get() + n, 0.0);
  std::fill(b.get(), b.get() + n, 0.0);
  std::copy(x.begin(), x.end(), a.get());
  std::copy(h.begin(), h.end(), b.get());

  fftw_execute_dft_r2c(plans.forward, a.get(), fa.get());
  fftw_execute_dft_r2c(plans.forward, b.get(), fb.get());
  for (std::size_t i = 0; i < bins; ++i) {
    const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute_dft_c2r(plans.inverse, fa.get(), a.get());

  const double scale = 1.0 / static_cast<double>(n);
  std::vector<float> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i)
    out[i] = static_cast<float>(a[i] * scale);
  return out;
}

std::vector<float> Convolve(std::span<const float> x, std::span<const float> h) {
  CheckNonEmpty(x, h);
  // Direct summation costs nnz(h) * len(x); the FFT route costs roughly
  // three transforms of size N, i.e. ~ 3 * N log2 N multiply-adds.
  const auto nonzero = static_cast<double>(
      std::count_if(h.begin(), h.end(), [](float v) { return v != 0.0f; }));
  const auto n = static_cast<double>(std::bit_ceil(x.size() + h.size() - 1));
  const double fft_cost = 3.0 * n * std::log2(n) + 4.0 * n;
  const double direct_cost = nonzero * static_cast<double>(x.size());
  if (direct_cost <= fft_cost) return ConvolveSparse(x, h);
  return ConvolveFft(x, h);
}

AudioBuffer Convolve(const AudioBuffer& x, const AudioBuffer& h) {
  if (x.sample_rate() != h.sample_rate())
    throw AudioError(AudioErrorKind::kRateMismatch,
                     "convolution operands at " +
                         std::to_string(x.sample_rate()) + " Hz and " +
                         std::to_string(h.sample_rate()) + " Hz");
  return AudioBuffer(Convolve(x.samples(), h.samples()), x.sample_rate());
}

AudioBuffer Convolve(const AudioBuffer& x, const Rir& h) {
  if (x.sample_rate() != Rir::sample_rate())
    throw AudioError(AudioErrorKind::kRateMismatch,
                     "signal at " + std::to_string(x.sample_rate()) +
                         " Hz convolved with a 16 kHz RIR");
  return AudioBuffer(Convolve(x.samples(), h.samples()), x.sample_rate());
}

}  // namespace reverbgen
