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

#ifndef REVERBGEN_ACOUSTIC_PARAMS_HPP_
#define REVERBGEN_ACOUSTIC_PARAMS_HPP_

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reverbgen/audio.hpp"

namespace reverbgen {

// Ratios in dB are clamped to this magnitude so delta-like inputs stay finite.
inline constexpr double kDbClamp = 120.0;
inline constexpr double kEnergyEpsilon = 1e-12;
// Floor applied to the decay curve where the remaining energy is exactly zero.
inline constexpr double kDecayFloorDb = -300.0;

enum class AcousticErrorKind { kZeroEnergy, kInsufficientDecay };

class AcousticError : public std::runtime_error {
 public:
  AcousticError(AcousticErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  AcousticErrorKind kind() const noexcept { return kind_; }

 private:
  AcousticErrorKind kind_;
};

struct AcousticParams {
  double t60 = 0.0;  // s
  double drr = 0.0;  // dB
  double edt = 0.0;  // s
  double cte = 0.0;  // dB, early (50 ms) to late energy

  friend bool operator==(const AcousticParams&, const AcousticParams&) = default;
};

/// Schroeder backward-integrated energy, in dB relative to total energy.
/// values[0] == 0 and the curve never increases.
struct DecayCurve {
  std::vector<double> values;
  double sample_rate = 0.0;
};

/// A view of an impulse response: samples plus rate. Estimators accept any
/// length, so full-length measured responses can be analyzed before they are
/// truncated to the canonical window.
struct ResponseView {
  std::span<const float> samples;
  double sample_rate;

  ResponseView(std::span<const float> s, double rate) : samples(s), sample_rate(rate) {}
  ResponseView(const Rir& rir)  // NOLINT(google-explicit-constructor)
      : samples(rir.samples()), sample_rate(Rir::sample_rate()) {}
  ResponseView(const AudioBuffer& b)  // NOLINT(google-explicit-constructor)
      : samples(b.samples()), sample_rate(b.sample_rate()) {}
};

DecayCurve EnergyDecayCurve(ResponseView rir);

/// Least-squares slope over the EDC span [-5, -25] dB, extrapolated to 60 dB.
double EstimateT60(ResponseView rir);
double EstimateT60(const DecayCurve& edc, std::size_t onset);

/// Least-squares slope from the direct-sound peak down to -10 dB, times 6.
double EstimateEdt(ResponseView rir);
double EstimateEdt(const DecayCurve& edc, std::size_t onset);

/// Energy within +/- direct_window_ms of the absolute peak over everything
/// else.
double EstimateDrr(ResponseView rir, double direct_window_ms = 2.5);

/// Energy in the 50 ms after the peak (peak included) over the remainder.
double EstimateCte(ResponseView rir);

AcousticParams Analyze(ResponseView rir);

/// Index of the largest |h|; the first one on ties.
std::size_t PeakIndex(std::span<const float> h) noexcept;

/// CSV with header `id,t60_s,drr_db,edt_s,cte_db`, six decimals.
void WriteParamsCsvHeader(std::ostream& os);
void WriteParamsCsvRow(std::ostream& os, const std::string& id,
                       const AcousticParams& p);

}  // namespace reverbgen

#endif  // REVERBGEN_ACOUSTIC_PARAMS_HPP_
