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

#include "reverbgen/acoustic_params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace reverbgen {
namespace {

double ClampDb(double db) { return std::clamp(db, -kDbClamp, kDbClamp); }

double TotalEnergy(std::span<const float> h) {
  double e = 0.0;
  for (float v : h) e += static_cast<double>(v) * v;
  return e;
}

void RequireEnergy(std::span<const float> h) {
  if (h.empty() || TotalEnergy(h) == 0.0)
    throw AcousticError(AcousticErrorKind::kZeroEnergy,
                        "impulse response has zero energy");
}

// Slope in dB/s of the least-squares line through edc[first..last].
double FitSlope(const DecayCurve& edc, std::size_t first, std::size_t last) {
  const double n = static_cast<double>(last - first + 1);
  double mean_t = 0.0, mean_y = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    mean_t += static_cast<double>(i);
    mean_y += edc.values[i];
  }
  mean_t /= n;
  mean_y /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double dt = static_cast<double>(i) - mean_t;
    sxy += dt * (edc.values[i] - mean_y);
    sxx += dt * dt;
  }
  return sxy / sxx * edc.sample_rate;
}

// Extrapolated 60 dB decay time from the fit over [first, last], where last
// is the final index still at or above `floor_db`.
double DecayTime(const DecayCurve& edc, std::size_t first, double floor_db,
                 const char* what) {
  const auto& v = edc.values;
  if (v.empty() || v.back() > floor_db)
    throw AcousticError(AcousticErrorKind::kInsufficientDecay,
                        std::string(what) + ": decay curve never reaches " +
                            std::to_string(floor_db) + " dB");
  // First index strictly below the floor; the curve is non-increasing.
  const auto below = static_cast<std::size_t>(
      std::upper_bound(v.begin(), v.end(), floor_db, std::greater<>()) -
      v.begin());
  if (below == 0 || below - 1 <= first)
    throw AcousticError(AcousticErrorKind::kInsufficientDecay,
                        std::string(what) + ": fewer than two points in fit span");
  const double slope = FitSlope(edc, first, below - 1);
  if (!(slope < 0.0))
    throw AcousticError(AcousticErrorKind::kInsufficientDecay,
                        std::string(what) + ": non-negative decay slope");
  return -60.0 / slope;
}

}  // namespace

std::size_t PeakIndex(std::span<const float> h) noexcept {
  std::size_t best = 0;
  float peak = -1.0f;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const float a = std::abs(h[i]);
    if (a > peak) {
      peak = a;
      best = i;
    }
  }
  return best;
}

DecayCurve EnergyDecayCurve(ResponseView rir) {
  RequireEnergy(rir.samples);
  const auto h = rir.samples;
  std::vector<double> tail(h.size());
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += static_cast<double>(h[i]) * h[i];
    tail[i] = acc;
  }
  const double total = tail[0];
  DecayCurve edc;
  edc.sample_rate = rir.sample_rate;
  edc.values.resize(h.size());
  edc.values[0] = 0.0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    const double db = tail[i] > 0.0 ? 10.0 * std::log10(tail[i] / total)
                                    : kDecayFloorDb;
    // Rounding in the running sum can nudge a value up by an ulp.
    edc.values[i] = std::min(std::max(db, kDecayFloorDb), edc.values[i - 1]);
  }
  return edc;
}

double EstimateT60(const DecayCurve& edc, std::size_t /*onset*/) {
  const auto& v = edc.values;
  const auto start = static_cast<std::size_t>(
      std::upper_bound(v.begin(), v.end(), -5.0, std::greater<>()) - v.begin());
  // upper_bound gives first index < -5; include an exact -5 sample.
  std::size_t first = start;
  while (first > 0 && v[first - 1] <= -5.0) --first;
  return DecayTime(edc, first, -25.0, "T60");
}

double EstimateT60(ResponseView rir) {
  return EstimateT60(EnergyDecayCurve(rir), PeakIndex(rir.samples));
}

double EstimateEdt(const DecayCurve& edc, std::size_t onset) {
  return DecayTime(edc, onset, -10.0, "EDT");
}

double EstimateEdt(ResponseView rir) {
  return EstimateEdt(EnergyDecayCurve(rir), PeakIndex(rir.samples));
}

double EstimateDrr(ResponseView rir, double direct_window_ms) {
  RequireEnergy(rir.samples);
  const auto h = rir.samples;
  const auto peak = static_cast<std::ptrdiff_t>(PeakIndex(h));
  const auto half = static_cast<std::ptrdiff_t>(
      std::llround(direct_window_ms * 1e-3 * rir.sample_rate));
  const auto lo = std::max<std::ptrdiff_t>(0, peak - half);
  const auto hi = std::min<std::ptrdiff_t>(
      static_cast<std::ptrdiff_t>(h.size()) - 1, peak + half);
  double direct = 0.0, rest = 0.0;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(h.size()); ++i) {
    const double e = static_cast<double>(h[i]) * h[i];
    (i >= lo && i <= hi ? direct : rest) += e;
  }
  return ClampDb(10.0 * std::log10(direct / (rest + kEnergyEpsilon)));
}

double EstimateCte(ResponseView rir) {
  RequireEnergy(rir.samples);
  const auto h = rir.samples;
  const std::size_t split = std::min(
      h.size(), PeakIndex(h) + static_cast<std::size_t>(
                                   std::llround(0.050 * rir.sample_rate)));
  double early = 0.0, late = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double e = static_cast<double>(h[i]) * h[i];
    (i < split ? early : late) += e;
  }
  return ClampDb(10.0 * std::log10(early / (late + kEnergyEpsilon)));
}

AcousticParams Analyze(ResponseView rir) {
  const DecayCurve edc = EnergyDecayCurve(rir);
  const std::size_t onset = PeakIndex(rir.samples);
  AcousticParams p;
  p.t60 = EstimateT60(edc, onset);
  p.edt = EstimateEdt(edc, onset);
  p.drr = EstimateDrr(rir);
  p.cte = EstimateCte(rir);
  return p;
}

void WriteParamsCsvHeader(std::ostream& os) {
  os << "id,t60_s,drr_db,edt_s,cte_db\n";
}

void WriteParamsCsvRow(std::ostream& os, const std::string& id,
                       const AcousticParams& p) {
  char line[160];
  std::snprintf(line, sizeof(line), ",%.6f,%.6f,%.6f,%.6f\n", p.t60, p.drr,
                p.edt, p.cte);
  os << id << line;
}

}  // namespace reverbgen
