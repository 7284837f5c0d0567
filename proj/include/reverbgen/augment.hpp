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

#ifndef REVERBGEN_AUGMENT_HPP_
#define REVERBGEN_AUGMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reverbgen/audio.hpp"
#include "reverbgen/corpus.hpp"

namespace reverbgen {

enum class SnrUnits { kLinear, kDecibel };

struct AugmentSpec {
  // Bounds are read in `units`; linear means a power ratio.
  double snr_lo = 10.0;
  double snr_hi = 100.0;
  SnrUnits units = SnrUnits::kLinear;
  std::uint64_t seed = 0;
  int sample_rate = kRirSampleRate;
  int threads = 1;

  void Validate() const;
  static AugmentSpec FromJsonFile(const std::filesystem::path& path);
};

/// One far-field utterance: y = (clean * rir)[0, n) + alpha * noise[(k + t) mod m],
/// then multiplied by `rescale` (1 unless the mix would clip).
struct MixRecord {
  std::string utt_id;
  std::string clean_path;
  std::string rir_id;
  std::string noise_id;
  double snr = 0.0;  // linear power ratio
  std::size_t k = 0;
  double alpha = 0.0;
  double rescale = 1.0;
  std::string out_path;
};

/// output[i] = noise[(k + i) mod len(noise)].
std::vector<float> LoopedNoise(std::span<const float> noise, std::size_t k, std::size_t length);

/// sqrt(P_s / (snr * P_n)) with P = mean square.
double ComputeAlpha(std::span<const float> reverberant, std::span<const float> noise_segment,
                    double snr);

struct MixResult {
  AudioBuffer audio;
  double alpha;
  double rescale;
};

/// All inputs at the same rate. `alpha_override` bypasses the SNR scaling.
MixResult Mix(const AudioBuffer& clean, const Rir& rir, const AudioBuffer& noise, double snr,
              std::size_t k, std::optional<double> alpha_override = std::nullopt);

struct CleanUtterance {
  std::string utt_id;
  std::filesystem::path path;
};

/// CSV `utt_id,path`; relative paths resolve against the manifest directory.
std::vector<CleanUtterance> LoadCleanManifest(const std::filesystem::path& path);

struct AugmentFailure {
  std::string utt_id;
  std::string message;
};

struct AugmentResult {
  std::vector<MixRecord> records;  // sorted by utt_id
  std::vector<AugmentFailure> failures;
};

/// Per utterance (seeded from the global seed and utt_id): draw a RIR and a
/// noise uniformly, an SNR uniformly within the spec range, and k uniformly
/// in [0, len(noise)); write `<out_dir>/<utt_id>.wav`.
AugmentResult AugmentCorpus(std::span<const CleanUtterance> clean, const RirPool& rirs,
                            const RirPool& noises, const AugmentSpec& spec,
                            const std::filesystem::path& out_dir);

/// One JSON object per line with keys
/// utt_id, clean_path, rir_id, noise_id, snr, k, alpha, rescale, out_path.
void WriteManifest(std::span<const MixRecord> records, std::ostream& os);
std::vector<MixRecord> ReadManifest(std::istream& is);

}  // namespace reverbgen

#endif  // REVERBGEN_AUGMENT_HPP_
