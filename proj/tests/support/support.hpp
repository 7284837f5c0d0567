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

// Fixtures and independent oracles shared by the unit and acceptance tests.
// Apart from MeasureMix, which reuses the separately verified convolution,
// nothing here calls into the library's DSP code.

#ifndef REVERBGEN_TESTS_SUPPORT_HPP_
#define REVERBGEN_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <cstddef>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "reverbgen/audio.hpp"

namespace reverbgen::testing {

/// Fresh directory under the system temp path, removed on destruction.
class ScopedTempDir {
 public:
  explicit ScopedTempDir(const std::string& prefix = "reverbgen-test");
  ~ScopedTempDir();
  ScopedTempDir(const ScopedTempDir&) = delete;
  ScopedTempDir& operator=(const ScopedTempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// O(n*m) direct convolution in double.
std::vector<double> DirectConvolve(std::span<const float> x, std::span<const float> h);

/// h[n] = 10^(-3 n / (fs * t60)): energy falls 60 dB in t60 seconds.
std::vector<float> ExponentialDecay(double t60, std::size_t length, double fs);

/// Gaussian noise under the same envelope with a strong direct tap at 0.
std::vector<float> NoisyExponentialDecay(double t60, std::size_t length, double fs,
                                         std::mt19937_64& rng, float direct = 3.0f);

/// 10 log10((1 - r) / r) with r = 10^(-6 * 0.05 / t60): the early/late energy
/// ratio of an untruncated exponential envelope split at 50 ms.
double ExponentialCteDb(double t60);

/// `count` canonical RIRs with designed T60 uniform in [t60_lo, t60_hi].
std::vector<Rir> SyntheticDecayDataset(std::size_t count, std::uint64_t seed,
                                       double t60_lo = 0.2, double t60_hi = 0.8);

/// Hand-assembled WAV writers, independent of the library writer.
void WritePcm16Wav(const std::filesystem::path& path, int rate, int channels,
                   std::span<const std::int16_t> interleaved);
void WriteFloatWav(const std::filesystem::path& path, int rate, int channels,
                   std::span<const float> interleaved, bool extensible = false);

struct TensorGradientCheck {
  std::string name;
  std::size_t checked = 0;
  std::size_t retried = 0;  // entries re-checked at the fallback step
  double max_rel_error = 0.0;
};

struct GradientCheckOptions {
  double step = 1e-4;
  // A difference straddling a ReLU kink is not a derivative; entries whose
  // error exceeds `tolerance` at `step` are re-checked once at this step.
  double fallback_step = 1e-6;
  double tolerance = 1e-4;
  // Evenly spaced entries checked per tensor (0 checks all).
  std::size_t max_per_tensor = 0;
  // Denominator floor for the relative error.
  double floor = 1e-8;
  std::uint64_t seed = 1;
};

/// Central finite differences against the analytic backward pass of a
/// 64-bit network with model size d, per parameter tensor. The generator
/// loss is a fixed random linear functional of its output; the critic loss
/// is its score with phase shuffle disabled, and its input gradient is
/// reported as a pseudo-tensor named "critic.input".
std::vector<TensorGradientCheck> CheckGeneratorGradients(int d, const GradientCheckOptions& o);
std::vector<TensorGradientCheck> CheckCriticGradients(int d, const GradientCheckOptions& o);

/// On-disk inputs for augmentation: a clean manifest (`utt_id,path`), a RIR
/// pool and a noise pool, with WAVs under `dir`. Clean utterances are
/// 0.5-2 s of modulated harmonics at 16 kHz; some noises are stored at
/// 8 kHz to exercise resampling.
struct AugmentFixture {
  std::filesystem::path clean_manifest;
  std::filesystem::path rir_pool;
  std::filesystem::path noise_pool;
};
AugmentFixture WriteAugmentFixture(const std::filesystem::path& dir, std::size_t utterances,
                                   std::size_t rirs, std::size_t noises, std::uint64_t seed);

/// Post-hoc SNR in dB of a written mix: reverberant speech is recomputed
/// from the clean file and the canonical RIR, the noise term is recovered as
/// output / rescale - reverberant, and their powers are compared. Also
/// returns the noise length seen by the mixer (at 16 kHz).
struct MeasuredMix {
  double snr_db = 0.0;
  std::size_t noise_length = 0;
  std::size_t output_length = 0;
  std::size_t clean_length = 0;
};
MeasuredMix MeasureMix(const std::string& clean_path, const std::string& rir_path,
                       const std::string& noise_path, const std::string& out_path,
                       double rescale);

/// Mean square in double.
double Power(std::span<const float> x);

}  // namespace reverbgen::testing

#endif  // REVERBGEN_TESTS_SUPPORT_HPP_
