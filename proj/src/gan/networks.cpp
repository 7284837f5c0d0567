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

#include "reverbgen/gan/networks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace reverbgen::gan {
namespace {

std::uint64_t NextIdentity() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

// Length of the signal entering transposed-conv layer `layer` (0-based).
int GeneratorInputLength(int layer) {
  int len = kBaseSteps;
  for (int i = 0; i < layer; ++i) len *= kStride;
  return len;
}

// Length of the signal produced by critic conv layer `layer`.
int CriticOutputLength(int layer) {
  int len = kOutputLength;
  for (int i = 0; i <= layer; ++i) len /= kStride;
  return len;
}

template <typename T>
void RequireFresh(const ParameterStore<T>& net, std::uint64_t identity,
                  std::uint64_t version, bool valid, const char* which) {
  if (!valid)
    throw StaleTapeError(std::string(which) + ": backward without a recorded forward pass");
  if (identity != net.identity())
    throw StaleTapeError(std::string(which) + ": tape recorded on a different network");
  if (version != net.version())
    throw StaleTapeError(std::string(which) + ": weights changed since the forward pass");
}

}  // namespace

LatentVector SampleLatent(std::mt19937_64& rng, LatentPrior prior) {
  LatentVector v;
  if (prior == LatentPrior::kUniform) {
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (float& x : v.z) x = dist(rng);
  } else {
    std::normal_distribution<float> dist(0.0f, 1.0f);
    for (float& x : v.z) x = dist(rng);
  }
  return v;
}

// ---------------------------------------------------------------------------
// ParameterStore

template <typename T>
ParameterStore<T>::ParameterStore() : identity_(NextIdentity()) {}

template <typename T>
ParameterStore<T>::ParameterStore(const ParameterStore& other)
    : params_(other.params_),
      layout_(other.layout_),
      next_offset_(other.next_offset_),
      version_(0),
      identity_(NextIdentity()) {}

template <typename T>
ParameterStore<T>& ParameterStore<T>::operator=(const ParameterStore& other) {
  if (this != &other) {
    params_ = other.params_;
    layout_ = other.layout_;
    next_offset_ = other.next_offset_;
    ++version_;
  }
  return *this;
}

template <typename T>
const ParamTensor& ParameterStore<T>::tensor(std::string_view name) const {
  for (const auto& t : layout_)
    if (t.name == name) return t;
  throw std::out_of_range("no parameter tensor named " + std::string(name));
}

template <typename T>
std::size_t ParameterStore<T>::AddTensor(std::string name, std::vector<int> shape) {
  std::size_t size = 1;
  for (int s : shape) size *= static_cast<std::size_t>(s);
  layout_.push_back({std::move(name), std::move(shape), next_offset_, size});
  next_offset_ += size;
  return layout_.size() - 1;
}

template <typename T>
void ParameterStore<T>::GlorotInit(std::mt19937_64& rng, std::size_t index,
                                   int fan_in, int fan_out) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  const auto& t = layout_[index];
  for (std::size_t i = 0; i < t.size; ++i)
    params_[t.offset + i] = static_cast<T>(dist(rng));
}

template <typename T>
void ClipValues(std::span<T> values, T c) {
  for (T& v : values) v = std::clamp(v, -c, c);
}

// ---------------------------------------------------------------------------
// Generator

template <typename T>
ConvGeometry Generator<T>::LayerGeometry(int d, int layer) {
  // Channel widths 16d, 8d, 4d, 2d, d, 1.
  const int in = layer == 0 ? 16 * d : (16 * d) >> layer;
  const int out = layer == kConvLayers - 1 ? 1 : (16 * d) >> (layer + 1);
  return {in, out, kKernel, kStride, (kKernel - kStride) / 2};
}

template <typename T>
void Generator<T>::BuildLayout() {
  const int dense_out = kBaseSteps * 16 * d_;
  dense_w_ = this->AddTensor("generator.dense.weight", {dense_out, kLatentDim});
  dense_b_ = this->AddTensor("generator.dense.bias", {dense_out});
  for (int l = 0; l < kConvLayers; ++l) {
    const ConvGeometry g = LayerGeometry(d_, l);
    const std::string base = "generator.tconv" + std::to_string(l + 1);
    conv_w_[l] = this->AddTensor(base + ".weight", {g.in_channels, g.out_channels, g.kernel});
    conv_b_[l] = this->AddTensor(base + ".bias", {g.out_channels});
  }
  this->Allocate();
}

template <typename T>
Generator<T>::Generator(int model_size) : d_(model_size) {
  if (d_ < 1) throw std::invalid_argument("model size multiplier must be >= 1");
  BuildLayout();
}

template <typename T>
Generator<T>::Generator(int model_size, std::mt19937_64& init_rng)
    : Generator(model_size) {
  this->GlorotInit(init_rng, dense_w_, kLatentDim, kBaseSteps * 16 * d_);
  for (int l = 0; l < kConvLayers; ++l) {
    const ConvGeometry g = LayerGeometry(d_, l);
    this->GlorotInit(init_rng, conv_w_[l], g.in_channels * g.kernel,
                     g.out_channels * g.kernel);
  }
}

template <typename T>
template <typename U>
Generator<T>::Generator(const Generator<U>& other) : Generator(other.model_size()) {
  const auto src = other.params();
  std::transform(src.begin(), src.end(), this->params_.begin(),
                 [](U v) { return static_cast<T>(v); });
}

template <typename T>
std::vector<T> Generator<T>::Forward(std::span<const T> z, GeneratorTape<T>* tape) const {
  if (z.size() != static_cast<std::size_t>(kLatentDim))
    throw std::invalid_argument("latent vector must have 100 components");
  const int dense_out = kBaseSteps * 16 * d_;
  std::vector<T> act(static_cast<std::size_t>(dense_out));
  DenseForward<T>(kLatentDim, dense_out, z, this->slice(dense_w_), this->slice(dense_b_), act);
  ReluInPlace<T>(act);
  if (tape) {
    tape->z.assign(z.begin(), z.end());
    tape->activations[0] = act;
  }
  int len = kBaseSteps;
  for (int l = 0; l < kConvLayers; ++l) {
    const ConvGeometry g = LayerGeometry(d_, l);
    std::vector<T> next(static_cast<std::size_t>(g.out_channels) * len * kStride);
    ConvTransposeForward<T>(g, len, act, this->slice(conv_w_[l]), this->slice(conv_b_[l]), next);
    if (l + 1 < kConvLayers)
      ReluInPlace<T>(next);
    else
      TanhInPlace<T>(next);
    act = std::move(next);
    len *= kStride;
    if (tape) tape->activations[l + 1] = act;
  }
  if (tape) {
    tape->identity = this->identity();
    tape->version = this->version();
    tape->valid = true;
  }
  return act;
}

template <typename T>
void Generator<T>::Backward(const GeneratorTape<T>& tape, std::span<const T> grad_output,
                            std::span<T> param_grad) const {
  RequireFresh(*this, tape.identity, tape.version, tape.valid, "generator");
  if (grad_output.size() != static_cast<std::size_t>(kOutputLength))
    throw std::invalid_argument("generator output gradient has wrong length");
  if (param_grad.size() != this->param_count())
    throw std::invalid_argument("generator gradient buffer has wrong size");
  const auto& L = this->layout_;

  std::vector<T> grad(grad_output.begin(), grad_output.end());
  TanhBackward<T>(tape.activations[kConvLayers], grad);
  for (int l = kConvLayers - 1; l >= 0; --l) {
    const ConvGeometry g = LayerGeometry(d_, l);
    const int in_len = GeneratorInputLength(l);
    const auto& input = tape.activations[l];
    std::vector<T> grad_in(input.size(), T(0));
    ConvTransposeBackward<T>(g, in_len, input, this->slice(conv_w_[l]), grad, grad_in,
                             this->slice(param_grad, L[conv_w_[l]]),
                             this->slice(param_grad, L[conv_b_[l]]));
    ReluBackward<T>(input, grad_in);
    grad = std::move(grad_in);
  }
  const int dense_out = kBaseSteps * 16 * d_;
  DenseBackward<T>(kLatentDim, dense_out, tape.z, this->slice(dense_w_), grad, {},
                   this->slice(param_grad, L[dense_w_]), this->slice(param_grad, L[dense_b_]));
}

// ---------------------------------------------------------------------------
// Critic

template <typename T>
ConvGeometry Critic<T>::LayerGeometry(int d, int layer) {
  // Channel widths 1, d, 2d, 4d, 8d, 16d.
  const int in = layer == 0 ? 1 : d << (layer - 1);
  const int out = d << layer;
  return {in, out, kKernel, kStride, (kKernel - kStride) / 2};
}

template <typename T>
void Critic<T>::BuildLayout() {
  for (int l = 0; l < kConvLayers; ++l) {
    const ConvGeometry g = LayerGeometry(d_, l);
    const std::string base = "critic.conv" + std::to_string(l + 1);
    conv_w_[l] = this->AddTensor(base + ".weight", {g.out_channels, g.in_channels, g.kernel});
    conv_b_[l] = this->AddTensor(base + ".bias", {g.out_channels});
  }
  const int flat = 16 * d_ * kBaseSteps;
  head_w_ = this->AddTensor("critic.dense.weight", {1, flat});
  head_b_ = this->AddTensor("critic.dense.bias", {1});
  this->Allocate();
}

template <typename T>
Critic<T>::Critic(int model_size, int shuffle_radius)
    : d_(model_size), radius_(shuffle_radius) {
  if (d_ < 1) throw std::invalid_argument("model size multiplier must be >= 1");
  if (radius_ < 0 || radius_ >= CriticOutputLength(kConvLayers - 2))
    throw std::invalid_argument("phase shuffle radius out of range");
  BuildLayout();
}

template <typename T>
Critic<T>::Critic(int model_size, int shuffle_radius, std::mt19937_64& init_rng)
    : Critic(model_size, shuffle_radius) {
  for (int l = 0; l < kConvLayers; ++l) {
    const ConvGeometry g = LayerGeometry(d_, l);
    this->GlorotInit(init_rng, conv_w_[l], g.in_channels * g.kernel,
                     g.out_channels * g.kernel);
  }
  this->GlorotInit(init_rng, head_w_, 16 * d_ * kBaseSteps, 1);
}

template <typename T>
template <typename U>
Critic<T>::Critic(const Critic<U>& other)
    : Critic(other.model_size(), other.shuffle_radius()) {
  const auto src = other.params();
  std::transform(src.begin(), src.end(), this->params_.begin(),
                 [](U v) { return static_cast<T>(v); });
}

template <typename T>
T Critic<T>::Forward(std::span<const T> x, std::mt19937_64* shuffle_rng,
                     CriticTape<T>* tape) const {
  if (x.size() != static_cast<std::size_t>(kOutputLength))
    throw std::invalid_argument("critic input must have " +
                                std::to_string(kOutputLength) + " samples, got " +
                                std::to_string(x.size()));
  std::vector<T> input(x.begin(), x.end());
  std::uniform_int_distribution<int> shift_dist(-radius_, radius_);
  for (int l = 0; l < kConvLayers; ++l) {
    const ConvGeometry g = LayerGeometry(d_, l);
    const int out_len = CriticOutputLength(l);
    std::vector<T> act(static_cast<std::size_t>(g.out_channels) * out_len);
    ConvForward<T>(g, out_len, input, this->slice(conv_w_[l]), this->slice(conv_b_[l]), act);
    LeakyReluInPlace<T>(act);
    if (tape) {
      tape->conv_inputs[l] = std::move(input);
      tape->activations[l] = act;
    }
    if (l + 1 < kConvLayers) {
      const int shift = (shuffle_rng && radius_ > 0) ? shift_dist(*shuffle_rng) : 0;
      if (tape) tape->shifts[l] = shift;
      if (shift != 0) {
        std::vector<T> shuffled(act.size());
        PhaseShuffleForward<T>(g.out_channels, out_len, shift, act, shuffled);
        input = std::move(shuffled);
      } else {
        input = std::move(act);
      }
    } else {
      input = std::move(act);
    }
  }
  T score;
  DenseForward<T>(static_cast<int>(input.size()), 1, input, this->slice(head_w_),
                  this->slice(head_b_), std::span<T>(&score, 1));
  if (tape) {
    tape->identity = this->identity();
    tape->version = this->version();
    tape->valid = true;
  }
  return score;
}

template <typename T>
void Critic<T>::Backward(const CriticTape<T>& tape, T grad_score, std::span<T> param_grad,
                         std::span<T> grad_input) const {
  RequireFresh(*this, tape.identity, tape.version, tape.valid, "critic");
  const bool want_params = !param_grad.empty();
  if (want_params && param_grad.size() != this->param_count())
    throw std::invalid_argument("critic gradient buffer has wrong size");
  const auto& L = this->layout_;
  auto grads_of = [&](std::size_t index) {
    return want_params ? this->slice(param_grad, L[index]) : std::span<T>();
  };

  const auto& last = tape.activations[kConvLayers - 1];
  std::vector<T> grad(last.size(), T(0));
  DenseBackward<T>(static_cast<int>(last.size()), 1, last, this->slice(head_w_),
                   std::span<const T>(&grad_score, 1), grad, grads_of(head_w_),
                   grads_of(head_b_));

  for (int l = kConvLayers - 1; l >= 0; --l) {
    const ConvGeometry g = LayerGeometry(d_, l);
    const int out_len = CriticOutputLength(l);
    if (l + 1 < kConvLayers && tape.shifts[l] != 0) {
      std::vector<T> unshuffled(grad.size(), T(0));
      PhaseShuffleBackward<T>(g.out_channels, out_len, tape.shifts[l], grad, unshuffled);
      grad = std::move(unshuffled);
    }
    LeakyReluBackward<T>(tape.activations[l], grad);
    const bool need_input = l > 0 || !grad_input.empty();
    std::vector<T> grad_in;
    if (need_input) grad_in.assign(tape.conv_inputs[l].size(), T(0));
    ConvBackward<T>(g, out_len, tape.conv_inputs[l], this->slice(conv_w_[l]), grad,
                    need_input ? std::span<T>(grad_in) : std::span<T>(),
                    grads_of(conv_w_[l]), grads_of(conv_b_[l]));
    grad = std::move(grad_in);
  }
  if (!grad_input.empty()) {
    if (grad_input.size() != grad.size())
      throw std::invalid_argument("critic input gradient buffer has wrong size");
    for (std::size_t i = 0; i < grad.size(); ++i) grad_input[i] += grad[i];
  }
}

template <typename T>
void Critic<T>::ClipWeights(T c) {
  if (!(c > T(0))) throw std::invalid_argument("clip bound must be positive");
  ClipValues<T>(this->mutable_params(), c);
}

template <typename T>
void Critic<T>::ZeroHead() {
  auto p = this->mutable_params();
  for (std::size_t idx : {head_w_, head_b_}) {
    auto s = this->slice(p, this->layout_[idx]);
    std::fill(s.begin(), s.end(), T(0));
  }
}

template class ParameterStore<float>;
template class ParameterStore<double>;
template class Generator<float>;
template class Generator<double>;
template class Critic<float>;
template class Critic<double>;
template Generator<double>::Generator(const Generator<float>&);
template Generator<float>::Generator(const Generator<double>&);
template Critic<double>::Critic(const Critic<float>&);
template Critic<float>::Critic(const Critic<double>&);
template void ClipValues<float>(std::span<float>, float);
template void ClipValues<double>(std::span<double>, double);

}  // namespace reverbgen::gan
