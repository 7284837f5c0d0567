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

#ifndef REVERBGEN_SAMPLER_HPP_
#define REVERBGEN_SAMPLER_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reverbgen/acoustic_params.hpp"
#include "reverbgen/audio.hpp"
#include "reverbgen/gan/model.hpp"

namespace reverbgen {

enum class Param { kT60 = 0, kDrr = 1, kEdt = 2, kCte = 3 };
inline constexpr std::array<Param, 4> kAllParams = {Param::kT60, Param::kDrr,
                                                    Param::kEdt, Param::kCte};
const char* ParamName(Param p);
double ParamValue(const AcousticParams& p, Param which);

/// Equal-width histogram. Bin i covers [edges[i], edges[i+1]); the last bin
/// is closed on the right.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::int64_t> counts;
  std::int64_t total_count = 0;

  double bin_width() const { return edges[1] - edges[0]; }
  std::size_t bin_count() const { return counts.size(); }
  /// Index of the bin holding v, or -1 outside [edges.front(), edges.back()].
  std::ptrdiff_t BinOf(double v) const;
  bool InSupport(double v) const;
  /// Distance from v to the nearest non-empty bin interval (0 inside one).
  double DistanceToSupport(double v) const;
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct ParamHistograms {
  std::array<Histogram, 4> histograms;

  const Histogram& operator[](Param p) const {
    return histograms[static_cast<std::size_t>(p)];
  }

  void Save(const std::filesystem::path& path) const;
  static ParamHistograms Load(const std::filesystem::path& path);
  friend bool operator==(const ParamHistograms&, const ParamHistograms&) = default;
};

struct SamplerConfig {
  int bins_per_param = 30;
  double relax_prob = 0.05;
  int max_tries_per_sample = 200;
  std::uint64_t seed = 0;
  // Worker w draws from a stream seeded with (seed + w) and owns output
  // slots w, w + workers, ...
  int workers = 1;

  void Validate() const;
};

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Equal-width bins spanning [min, max] of the training values. A single
/// distinct value gets a narrow bin range centred on it.
ParamHistograms BuildHistograms(std::span<const AcousticParams> params,
                                const SamplerConfig& config);

struct AcceptDecision {
  bool accepted = false;
  bool relaxed = false;          // accepted only through the relaxation draw
  std::vector<Param> violations; // parameters outside the support
  std::string reason;            // comma-joined names, empty when in support
};

/// In support (all four values in non-empty bins) -> accept. Otherwise, if
/// every miss lies within one bin width of the support, accept with
/// probability relax_prob; anything further out is rejected. Exactly one
/// uniform draw is consumed per call.
AcceptDecision Accept(const AcousticParams& p, const ParamHistograms& h,
                      double relax_prob, std::mt19937_64& rng);

struct GenerationReport {
  std::array<std::int64_t, 4> rejections{};  // by parameter
  std::int64_t analysis_failures = 0;        // candidate could not be analyzed
  std::int64_t accepted = 0;
  std::int64_t relaxed_accepts = 0;
  std::int64_t rejected = 0;
  std::int64_t tries = 0;

  /// CSV `parameter,rejections` followed by total rows.
  void WriteCsv(std::ostream& os) const;
  void Merge(const GenerationReport& other);
};

struct GenerationResult {
  std::vector<Rir> rirs;
  std::vector<AcousticParams> params;
  GenerationReport report;
};

/// Sample z, run the generator, canonicalize, analyze, and keep candidates
/// that pass Accept until n are collected. Throws SamplerError if any
/// output slot exhausts max_tries_per_sample.
GenerationResult GenerateConstrained(const gan::GanModel& model, const ParamHistograms& h,
                                     int n, const SamplerConfig& config);

/// The same pipeline without the acceptance test (candidates that cannot be
/// canonicalized are still skipped).
GenerationResult GenerateUnconstrained(const gan::GanModel& model, int n,
                                       const SamplerConfig& config);

}  // namespace reverbgen

#endif  // REVERBGEN_SAMPLER_HPP_
