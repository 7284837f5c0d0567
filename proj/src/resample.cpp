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

#include "reverbgen/resample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <numbers>

namespace reverbgen {

AudioBuffer Resample(const AudioBuffer& buffer, int target_rate,
                     const ResamplerOptions& options) {
  if (target_rate <= 0)
    throw AudioError(AudioErrorKind::kInvalidBuffer,
                     "target sample rate must be positive");
  const int source_rate = buffer.sample_rate();
  if (target_rate == source_rate) return buffer;

  const auto x = buffer.samples();
  const auto n_in = static_cast<std::ptrdiff_t>(x.size());
  const double ratio = static_cast<double>(target_rate) / source_rate;
  const auto n_out = std::max<std::ptrdiff_t>(
      1, static_cast<std::ptrdiff_t>(std::llround(n_in * ratio)));

  // Everything below is measured in input-sample units.
  const double cutoff =
      options.rolloff * 0.5 * std::min(source_rate, target_rate) / source_rate;
  const double half_width = options.half_zero_crossings / (2.0 * cutoff);
  const double i0_beta = std::cyl_bessel_i(0.0, options.kaiser_beta);

  auto kernel = [&](double u) {
    const double r = u / half_width;
    if (std::abs(r) >= 1.0) return 0.0;
    const double window =
        std::cyl_bessel_i(0.0, options.kaiser_beta * std::sqrt(1.0 - r * r)) /
        i0_beta;
    const double arg = 2.0 * cutoff * u;
    const double sinc =
        arg == 0.0 ? 1.0
                   : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    return 2.0 * cutoff * sinc * window;
  };

  std::vector<float> out(static_cast<std::size_t>(n_out));
  // Normalizing by the realized tap sum keeps DC gain exactly one, including
  // near the edges where the kernel is cut off.
  auto emit = [&](std::ptrdiff_t j, std::ptrdiff_t first, std::ptrdiff_t last,
                  auto&& tap) {
    double acc = 0.0, weight = 0.0;
    for (std::ptrdiff_t i = first; i <= last; ++i) {
      const double g = tap(i);
      acc += g * x[static_cast<std::size_t>(i)];
      weight += g;
    }
    out[static_cast<std::size_t>(j)] =
        weight > 0.0 ? static_cast<float>(acc / weight) : 0.0f;
  };

  // Output j sits at input position j * M / L. With few distinct phases the
  // taps are tabulated once per phase instead of per output sample.
  const std::int64_t g = std::gcd(source_rate, target_rate);
  const std::int64_t up = target_rate / g, down = source_rate / g;
  constexpr std::int64_t kMaxPhases = 4096;
  if (up <= kMaxPhases) {
    struct Phase {
      std::ptrdiff_t lo;  // first tap offset relative to floor(centre)
      std::vector<double> taps;
    };
    std::vector<Phase> phases(static_cast<std::size_t>(up));
    for (std::int64_t p = 0; p < up; ++p) {
      const double frac = static_cast<double>(p) / static_cast<double>(up);
      Phase& ph = phases[static_cast<std::size_t>(p)];
      ph.lo = static_cast<std::ptrdiff_t>(std::ceil(frac - half_width));
      const auto hi = static_cast<std::ptrdiff_t>(std::floor(frac + half_width));
      for (std::ptrdiff_t t = ph.lo; t <= hi; ++t) ph.taps.push_back(kernel(frac - t));
    }
    for (std::ptrdiff_t j = 0; j < n_out; ++j) {
      const std::int64_t pos = j * down;
      const auto base = static_cast<std::ptrdiff_t>(pos / up);
      const Phase& ph = phases[static_cast<std::size_t>(pos % up)];
      const std::ptrdiff_t start = base + ph.lo;
      const auto first = std::max<std::ptrdiff_t>(0, start);
      const auto last = std::min<std::ptrdiff_t>(
          n_in - 1, start + static_cast<std::ptrdiff_t>(ph.taps.size()) - 1);
      emit(j, first, last, [&](std::ptrdiff_t i) { return ph.taps[i - start]; });
    }
  } else {
    for (std::ptrdiff_t j = 0; j < n_out; ++j) {
      const double centre = static_cast<double>(j) * down / up;
      const auto first = std::max<std::ptrdiff_t>(
          0, static_cast<std::ptrdiff_t>(std::ceil(centre - half_width)));
      const auto last = std::min<std::ptrdiff_t>(
          n_in - 1, static_cast<std::ptrdiff_t>(std::floor(centre + half_width)));
      emit(j, first, last,
           [&](std::ptrdiff_t i) { return kernel(centre - static_cast<double>(i)); });
    }
  }
  return AudioBuffer(std::move(out), target_rate);
}

}  // namespace reverbgen
