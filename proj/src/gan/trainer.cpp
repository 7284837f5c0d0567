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

#include "reverbgen/gan/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "reverbgen/seed.hpp"

namespace reverbgen::gan {
namespace {

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void RequireBatch(std::span<const double> v, const char* which) {
  if (v.empty()) throw std::invalid_argument(std::string(which) + " batch is empty");
}

std::string CheckpointName(int step) {
  char name[64];
  std::snprintf(name, sizeof(name), "checkpoint_%06d.irgan", step);
  return name;
}

}  // namespace

double CriticLoss(std::span<const double> real_scores, std::span<const double> fake_scores) {
  RequireBatch(real_scores, "real");
  RequireBatch(fake_scores, "fake");
  return Mean(fake_scores) - Mean(real_scores);
}

double GeneratorLoss(std::span<const double> fake_scores) {
  RequireBatch(fake_scores, "fake");
  return -Mean(fake_scores);
}

RmsProp::RmsProp(std::size_t size, double learning_rate, double decay, double epsilon)
    : mean_square_(size, 0.0f),
      learning_rate_(static_cast<float>(learning_rate)),
      decay_(static_cast<float>(decay)),
      epsilon_(static_cast<float>(epsilon)) {}

void RmsProp::Step(std::span<float> params, std::span<const float> grads) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const float g = grads[i];
    float& v = mean_square_[i];
    v = decay_ * v + (1.0f - decay_) * g * g;
    params[i] -= learning_rate_ * g / (std::sqrt(v) + epsilon_);
  }
}

void TrainConfig::Validate() const {
  if (!(clip_c > 0.0)) throw std::invalid_argument("clip_c must be > 0");
  if (n_critic < 1) throw std::invalid_argument("n_critic must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (generator_steps < 0) throw std::invalid_argument("generator_steps must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (model_size < 1) throw std::invalid_argument("model size d must be >= 1");
  if (checkpoint_every < 0) throw std::invalid_argument("checkpoint_every must be >= 0");
}

void TrainLog::WriteCsv(std::ostream& os) const {
  os << "step,critic_loss,generator_loss,wasserstein_estimate\n";
  char line[160];
  for (const auto& r : steps) {
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g\n", r.step, r.critic_loss,
                  r.generator_loss, r.wasserstein_estimate);
    os << line;
  }
}

TrainResult Train(const TrainConfig& config, std::span<const Rir> dataset,
                  const TrainProgress& progress) {
  config.Validate();
  if (dataset.empty()) throw std::invalid_argument("training dataset is empty");

  std::mt19937_64 gen_init(DeriveSeed(config.seed, "generator-init"));
  std::mt19937_64 critic_init(DeriveSeed(config.seed, "critic-init"));
  std::mt19937_64 latent_rng(DeriveSeed(config.seed, "latent"));
  std::mt19937_64 data_rng(DeriveSeed(config.seed, "data"));
  std::mt19937_64 shuffle_rng(DeriveSeed(config.seed, "phase-shuffle"));

  TrainResult result{
      GanModel(Generator<float>(config.model_size, gen_init),
               Critic<float>(config.model_size, config.shuffle_radius, critic_init)),
      {}};
  result.model.seed = config.seed;
  result.model.prior = config.prior;
  result.model.critic.ClipWeights(static_cast<float>(config.clip_c));

  Generator<float>& gen = result.model.generator;
  Critic<float>& critic = result.model.critic;
  RmsProp gen_opt(gen.param_count(), config.learning_rate, config.rmsprop_decay,
                  config.rmsprop_epsilon);
  RmsProp critic_opt(critic.param_count(), config.learning_rate, config.rmsprop_decay,
                     config.rmsprop_epsilon);

  const int batch = config.batch_size;
  const float inv_batch = 1.0f / static_cast<float>(batch);
  std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);

  std::vector<float> critic_grad(critic.param_count());
  std::vector<float> gen_grad(gen.param_count());
  std::vector<float> input_grad(kOutputLength);
  std::vector<double> real_scores(batch), fake_scores(batch);
  CriticTape<float> critic_tape;
  GeneratorTape<float> gen_tape;

  auto check_finite = [&](double v, const char* what, int step) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite " << what << " at generator step " << step
          << " (critic updates so far: " << result.log.critic_updates.size() << ")";
      throw TrainingError(msg.str());
    }
  };

  for (int step = 1; step <= config.generator_steps; ++step) {
    GeneratorStepRecord record;
    record.step = step;

    for (int it = 0; it < config.n_critic; ++it) {
      std::fill(critic_grad.begin(), critic_grad.end(), 0.0f);
      for (int b = 0; b < batch; ++b) {
        const Rir& real = dataset[pick(data_rng)];
        real_scores[b] = critic.Forward(real.samples(), &shuffle_rng, &critic_tape);
        critic.Backward(critic_tape, -inv_batch, critic_grad, {});

        const LatentVector z = SampleLatent(latent_rng, config.prior);
        const std::vector<float> fake = gen.Forward(z.z);
        fake_scores[b] = critic.Forward(fake, &shuffle_rng, &critic_tape);
        critic.Backward(critic_tape, inv_batch, critic_grad, {});
      }
      const double loss = CriticLoss(real_scores, fake_scores);
      check_finite(loss, "critic loss", step);
      critic_opt.Step(critic.mutable_params(), critic_grad);
      critic.ClipWeights(static_cast<float>(config.clip_c));
      result.log.critic_updates.push_back({step, it, loss});
      record.critic_loss = loss;
      record.wasserstein_estimate = -loss;
    }

    std::fill(gen_grad.begin(), gen_grad.end(), 0.0f);
    for (int b = 0; b < batch; ++b) {
      const LatentVector z = SampleLatent(latent_rng, config.prior);
      const std::vector<float> fake = gen.Forward(z.z, &gen_tape);
      fake_scores[b] = critic.Forward(fake, &shuffle_rng, &critic_tape);
      std::fill(input_grad.begin(), input_grad.end(), 0.0f);
      critic.Backward(critic_tape, -inv_batch, {}, input_grad);
      gen.Backward(gen_tape, input_grad, gen_grad);
    }
    record.generator_loss = GeneratorLoss(fake_scores);
    check_finite(record.generator_loss, "generator loss", step);
    gen_opt.Step(gen.mutable_params(), gen_grad);

    result.model.step = step;
    result.log.steps.push_back(record);

    if (config.checkpoint_every > 0 && step % config.checkpoint_every == 0) {
      std::filesystem::create_directories(config.checkpoint_dir);
      SaveCheckpoint(result.model, config.checkpoint_dir / CheckpointName(step));
    }
    if (progress && !progress(record)) break;
  }
  return result;
}

}  // namespace reverbgen::gan
