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

#ifndef REVERBGEN_GAN_NETWORKS_HPP_
#define REVERBGEN_GAN_NETWORKS_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reverbgen/gan/layers.hpp"

namespace reverbgen::gan {

inline constexpr int kLatentDim = 100;
inline constexpr int kOutputLength = 16384;
inline constexpr int kKernel = 25;
inline constexpr int kStride = 4;
inline constexpr int kBaseSteps = 16;  // time steps after the dense stage
inline constexpr int kConvLayers = 5;

enum class LatentPrior { kUniform, kGaussian };

struct LatentVector {
  std::array<float, kLatentDim> z{};
};

/// Draws z i.i.d. Uniform[-1, 1] (default) or standard normal.
LatentVector SampleLatent(std::mt19937_64& rng,
                          LatentPrior prior = LatentPrior::kUniform);

struct ParamTensor {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Raised when backward() is handed a tape that was not recorded against the
/// network's current weights.
class StaleTapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Flat parameter storage shared by both networks. Layers address slices of
/// one contiguous buffer, so optimizers and clipping treat every weight
/// uniformly and checkpoints serialize in declaration order.
template <typename T>
class ParameterStore {
 public:
  std::span<const T> params() const noexcept { return params_; }
  /// Mutable access invalidates recorded tapes.
  std::span<T> mutable_params() noexcept {
    ++version_;
    return params_;
  }
  const std::vector<ParamTensor>& layout() const noexcept { return layout_; }
  std::size_t param_count() const noexcept { return params_.size(); }
  std::uint64_t version() const noexcept { return version_; }
  std::uint64_t identity() const noexcept { return identity_; }
  const ParamTensor& tensor(std::string_view name) const;

  ParameterStore(const ParameterStore& other);
  ParameterStore& operator=(const ParameterStore& other);
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;

 protected:
  ParameterStore();
  std::size_t AddTensor(std::string name, std::vector<int> shape);
  void Allocate() { params_.assign(next_offset_, T(0)); }
  std::span<const T> slice(std::size_t index) const {
    const auto& t = layout_[index];
    return std::span<const T>(params_).subspan(t.offset, t.size);
  }
  static std::span<T> slice(std::span<T> buffer, const ParamTensor& t) {
    return buffer.subspan(t.offset, t.size);
  }
  void GlorotInit(std::mt19937_64& rng, std::size_t index, int fan_in, int fan_out);

  std::vector<T> params_;
  std::vector<ParamTensor> layout_;

 private:
  std::size_t next_offset_ = 0;
  std::uint64_t version_ = 0;
  std::uint64_t identity_;
};

template <typename T>
struct GeneratorTape {
  std::uint64_t identity = 0;
  std::uint64_t version = 0;
  bool valid = false;
  std::vector<T> z;
  // Post-activation outputs: dense stage, then each transposed convolution.
  std::array<std::vector<T>, kConvLayers + 1> activations;
};

/// dense(100 -> 16 x 16d) -> ReLU -> five stride-4 transposed convolutions
/// (16d -> 8d -> 4d -> 2d -> d -> 1) with ReLU between and tanh at the end.
template <typename T>
class Generator : public ParameterStore<T> {
 public:
  /// Zero weights; used when loading checkpoints.
  explicit Generator(int model_size);
  Generator(int model_size, std::mt19937_64& init_rng);
  template <typename U>
  explicit Generator(const Generator<U>& other);

  int model_size() const noexcept { return d_; }

  std::vector<T> Forward(std::span<const T> z, GeneratorTape<T>* tape = nullptr) const;

  /// Accumulates d(loss)/d(params) into param_grad given d(loss)/d(output).
  void Backward(const GeneratorTape<T>& tape, std::span<const T> grad_output,
                std::span<T> param_grad) const;

  static ConvGeometry LayerGeometry(int model_size, int layer);

 private:
  void BuildLayout();
  int d_;
  std::size_t dense_w_ = 0, dense_b_ = 0;
  std::array<std::size_t, kConvLayers> conv_w_{}, conv_b_{};
};

/// Phase shuffle source: null disables shuffling (evaluation mode).
template <typename T>
struct CriticTape {
  std::uint64_t identity = 0;
  std::uint64_t version = 0;
  bool valid = false;
  std::array<std::vector<T>, kConvLayers> conv_inputs;   // after shuffle
  std::array<std::vector<T>, kConvLayers> activations;   // after leaky ReLU
  std::array<int, kConvLayers - 1> shifts{};
};

/// Five stride-4 convolutions (1 -> d -> 2d -> 4d -> 8d -> 16d), leaky ReLU
/// (0.2) after each, phase shuffle between them, then a dense head producing
/// one unbounded score.
template <typename T>
class Critic : public ParameterStore<T> {
 public:
  explicit Critic(int model_size, int shuffle_radius = 2);
  Critic(int model_size, int shuffle_radius, std::mt19937_64& init_rng);
  template <typename U>
  explicit Critic(const Critic<U>& other);

  int model_size() const noexcept { return d_; }
  int shuffle_radius() const noexcept { return radius_; }

  /// `shuffle_rng == nullptr` disables phase shuffle.
  T Forward(std::span<const T> x, std::mt19937_64* shuffle_rng,
            CriticTape<T>* tape = nullptr) const;

  /// Either output span may be empty to skip that gradient.
  void Backward(const CriticTape<T>& tape, T grad_score, std::span<T> param_grad,
                std::span<T> grad_input) const;

  /// Clamps every parameter (weights and biases) into [-c, c].
  void ClipWeights(T c);

  void ZeroHead();

  static ConvGeometry LayerGeometry(int model_size, int layer);

 private:
  void BuildLayout();
  int d_;
  int radius_;
  std::array<std::size_t, kConvLayers> conv_w_{}, conv_b_{};
  std::size_t head_w_ = 0, head_b_ = 0;
};

/// Clamps every element of `values` into [-c, c].
template <typename T>
void ClipValues(std::span<T> values, T c);

}  // namespace reverbgen::gan

#endif  // REVERBGEN_GAN_NETWORKS_HPP_
