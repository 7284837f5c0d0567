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

#ifndef REVERBGEN_GAN_TRAINER_HPP_
#define REVERBGEN_GAN_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "reverbgen/audio.hpp"
#include "reverbgen/gan/model.hpp"

namespace reverbgen::gan {

/// mean(fake) - mean(real); the critic minimizes it.
double CriticLoss(std::span<const double> real_scores, std::span<const double> fake_scores);
/// -mean(fake).
double GeneratorLoss(std::span<const double> fake_scores);

/// Per-parameter running average of squared gradients:
///   v <- decay * v + (1 - decay) * g^2;  w <- w - lr * g / (sqrt(v) + eps)
class RmsProp {
 public:
  RmsProp(std::size_t size, double learning_rate, double decay = 0.9, double epsilon = 1e-8);
  void Step(std::span<float> params, std::span<const float> grads);

 private:
  std::vector<float> mean_square_;
  float learning_rate_, decay_, epsilon_;
};

struct TrainConfig {
  double learning_rate = 5e-5;
  double clip_c = 0.01;
  int n_critic = 5;
  int batch_size = 16;
  int generator_steps = 500;
  std::uint64_t seed = 0;
  int model_size = 4;
  int shuffle_radius = 2;
  LatentPrior prior = LatentPrior::kUniform;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  // Checkpoint every K generator steps into checkpoint_dir (0 disables).
  int checkpoint_every = 0;
  std::filesystem::path checkpoint_dir;

  void Validate() const;
};

struct GeneratorStepRecord {
  int step = 0;
  double critic_loss = 0.0;        // last critic update of this step
  double generator_loss = 0.0;
  double wasserstein_estimate = 0.0;  // mean(real) - mean(fake), same update
};

struct CriticUpdateRecord {
  int step = 0;        // generator step this update belongs to
  int iteration = 0;   // 0 .. n_critic-1
  double loss = 0.0;
};

struct TrainLog {
  std::vector<GeneratorStepRecord> steps;
  std::vector<CriticUpdateRecord> critic_updates;

  /// CSV `step,critic_loss,generator_loss,wasserstein_estimate`.
  void WriteCsv(std::ostream& os) const;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainResult {
  GanModel model;
  TrainLog log;
};

/// Called after each generator step; return false to stop early.
using TrainProgress = std::function<bool(const GeneratorStepRecord&)>;

/// Alternating WGAN optimization: n_critic clipped critic updates per
/// generator update. Single-threaded and bit-reproducible for a given seed.
TrainResult Train(const TrainConfig& config, std::span<const Rir> dataset,
                  const TrainProgress& progress = {});

}  // namespace reverbgen::gan

#endif  // REVERBGEN_GAN_TRAINER_HPP_
