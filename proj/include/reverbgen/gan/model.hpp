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

#ifndef REVERBGEN_GAN_MODEL_HPP_
#define REVERBGEN_GAN_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "reverbgen/gan/networks.hpp"

namespace reverbgen::gan {

/// A generator/critic pair plus the metadata needed to rebuild it.
struct GanModel {
  Generator<float> generator;
  Critic<float> critic;
  std::int64_t step = 0;
  std::uint64_t seed = 0;
  LatentPrior prior = LatentPrior::kUniform;

  GanModel(int model_size, int shuffle_radius)
      : generator(model_size), critic(model_size, shuffle_radius) {}
  GanModel(Generator<float> g, Critic<float> c)
      : generator(std::move(g)), critic(std::move(c)) {}

  int model_size() const noexcept { return generator.model_size(); }
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kCheckpointMagic[] = "IRGAN01";

/// Layout: the 7 magic bytes "IRGAN01", a little-endian uint32 header length,
/// a JSON header (format version, d, step, seed, prior, phase-shuffle radius,
/// ordered layer list with shapes), then every tensor as little-endian
/// float32 in header order (generator first, then critic).
void SaveCheckpoint(const GanModel& model, const std::filesystem::path& path);
GanModel LoadCheckpoint(const std::filesystem::path& path);

std::string PriorName(LatentPrior prior);
LatentPrior ParsePrior(const std::string& name);

}  // namespace reverbgen::gan

#endif  // REVERBGEN_GAN_MODEL_HPP_
