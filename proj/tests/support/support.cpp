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

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "reverbgen/gan/networks.hpp"
#include "reverbgen/convolve.hpp"
#include "reverbgen/resample.hpp"
#include "reverbgen/wav_io.hpp"

namespace reverbgen::testing {
namespace {

template <typename T>
void Put(std::ofstream& os, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));  // little-endian host assumed
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

void WriteWav(const std::filesystem::path& path, int rate, int channels, int bits,
              std::uint16_t format, bool extensible, const void* data,
              std::uint32_t data_bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  const std::uint32_t fmt_size = extensible ? 40 : 16;
  const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
  os.write("RIFF", 4);
  Put<std::uint32_t>(os, 4 + 8 + fmt_size + 8 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  Put<std::uint32_t>(os, fmt_size);
  Put<std::uint16_t>(os, extensible ? 0xFFFE : format);
  Put<std::uint16_t>(os, static_cast<std::uint16_t>(channels));
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(rate));
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(rate) * block);
  Put<std::uint16_t>(os, block);
  Put<std::uint16_t>(os, static_cast<std::uint16_t>(bits));
  if (extensible) {
    Put<std::uint16_t>(os, 22);
    Put<std::uint16_t>(os, static_cast<std::uint16_t>(bits));
    Put<std::uint32_t>(os, 0);
    // Sub-format GUID: format code followed by the fixed KSDATAFORMAT tail.
    static const unsigned char tail[14] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                           0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};
    Put<std::uint16_t>(os, format);
    os.write(reinterpret_cast<const char*>(tail), sizeof(tail));
  }
  // An unknown chunk before the data exercises chunk skipping.
  os.write("LIST", 4);
  Put<std::uint32_t>(os, 4);
  os.write("INFO", 4);
  os.write("data", 4);
  Put<std::uint32_t>(os, data_bytes);
  os.write(static_cast<const char*>(data), data_bytes);
}

}  // namespace

ScopedTempDir::ScopedTempDir(const std::string& prefix) {
  static std::mt19937_64 rng(std::random_device{}());
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / (prefix + "-" + std::to_string(rng()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

ScopedTempDir::~ScopedTempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<double> DirectConvolve(std::span<const float> x, std::span<const float> h) {
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j)
      y[i + j] += static_cast<double>(x[i]) * h[j];
  return y;
}

std::vector<float> ExponentialDecay(double t60, std::size_t length, double fs) {
  std::vector<float> h(length);
  for (std::size_t n = 0; n < length; ++n)
    h[n] = static_cast<float>(std::pow(10.0, -3.0 * static_cast<double>(n) / (fs * t60)));
  return h;
}

std::vector<float> NoisyExponentialDecay(double t60, std::size_t length, double fs,
                                         std::mt19937_64& rng, float direct) {
  std::normal_distribution<double> noise;
  std::vector<float> h(length);
  for (std::size_t n = 0; n < length; ++n)
    h[n] = static_cast<float>(noise(rng) *
                              std::pow(10.0, -3.0 * static_cast<double>(n) / (fs * t60)));
  h[0] = direct;
  return h;
}

double ExponentialCteDb(double t60) {
  const double r = std::pow(10.0, -6.0 * 0.05 / t60);
  return 10.0 * std::log10((1.0 - r) / r);
}

std::vector<Rir> SyntheticDecayDataset(std::size_t count, std::uint64_t seed,
                                       double t60_lo, double t60_hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> t60(t60_lo, t60_hi);
  std::vector<Rir> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = t60(rng);
    out.push_back(Rir::FromSamples(
        NoisyExponentialDecay(t, kRirLength, kRirSampleRate, rng)));
  }
  return out;
}

void WritePcm16Wav(const std::filesystem::path& path, int rate, int channels,
                   std::span<const std::int16_t> interleaved) {
  WriteWav(path, rate, channels, 16, 1, false, interleaved.data(),
           static_cast<std::uint32_t>(interleaved.size_bytes()));
}

void WriteFloatWav(const std::filesystem::path& path, int rate, int channels,
                   std::span<const float> interleaved, bool extensible) {
  WriteWav(path, rate, channels, 32, 3, extensible, interleaved.data(),
           static_cast<std::uint32_t>(interleaved.size_bytes()));
}

namespace {

double RelativeError(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

// `perturb(delta)` adds delta to the checked value and returns the loss.
template <typename Perturb>
void CheckEntry(TensorGradientCheck& c, double analytic, const Perturb& perturb,
                const GradientCheckOptions& o) {
  auto numeric = [&](double h) { return (perturb(h) - perturb(-h)) / (2 * h); };
  double err = RelativeError(analytic, numeric(o.step), o.floor);
  if (err >= o.tolerance) {
    err = RelativeError(analytic, numeric(o.fallback_step), o.floor);
    ++c.retried;
  }
  c.max_rel_error = std::max(c.max_rel_error, err);
  ++c.checked;
}

std::size_t Stride(std::size_t size, std::size_t cap) {
  return cap == 0 || size <= cap ? 1 : (size + cap - 1) / cap;
}

template <typename Net, typename Loss>
std::vector<TensorGradientCheck> CheckTensors(Net& net, const std::vector<double>& analytic,
                                              const Loss& loss,
                                              const GradientCheckOptions& o) {
  std::vector<TensorGradientCheck> out;
  for (const auto& t : net.layout()) {
    TensorGradientCheck c{t.name};
    for (std::size_t i = 0; i < t.size; i += Stride(t.size, o.max_per_tensor)) {
      const std::size_t idx = t.offset + i;
      const double saved = net.params()[idx];
      CheckEntry(c, analytic[idx], [&](double h) {
        net.mutable_params()[idx] = saved + h;
        const double l = loss();
        net.mutable_params()[idx] = saved;
        return l;
      }, o);
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<TensorGradientCheck> CheckGeneratorGradients(int d, const GradientCheckOptions& o) {
  std::mt19937_64 rng(o.seed);
  gan::Generator<double> net(d, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> z(gan::kLatentDim), r(gan::kOutputLength);
  for (auto& v : z) v = u(rng);
  for (auto& v : r) v = u(rng);
  auto loss = [&] {
    const auto y = net.Forward(z);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += r[i] * y[i];
    return s;
  };
  gan::GeneratorTape<double> tape;
  net.Forward(z, &tape);
  std::vector<double> grad(net.param_count(), 0.0);
  net.Backward(tape, r, grad);
  return CheckTensors(net, grad, loss, o);
}

std::vector<TensorGradientCheck> CheckCriticGradients(int d, const GradientCheckOptions& o) {
  std::mt19937_64 rng(o.seed);
  gan::Critic<double> net(d, 2, rng);
  // Unclipped Glorot weights keep the score well away from zero.
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(gan::kOutputLength);
  for (auto& v : x) v = u(rng);
  auto loss = [&] { return net.Forward(x, nullptr); };
  gan::CriticTape<double> tape;
  net.Forward(x, nullptr, &tape);
  std::vector<double> grad(net.param_count(), 0.0), grad_x(x.size(), 0.0);
  net.Backward(tape, 1.0, grad, grad_x);
  auto out = CheckTensors(net, grad, loss, o);

  TensorGradientCheck in{"critic.input"};
  for (std::size_t i = 0; i < x.size(); i += Stride(x.size(), o.max_per_tensor)) {
    const double saved = x[i];
    CheckEntry(in, grad_x[i], [&](double h) {
      x[i] = saved + h;
      const double l = loss();
      x[i] = saved;
      return l;
    }, o);
  }
  out.push_back(in);
  return out;
}

AugmentFixture WriteAugmentFixture(const std::filesystem::path& dir, std::size_t utterances,
                                   std::size_t rirs, std::size_t noises, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  std::filesystem::create_directories(dir / "clean");
  std::filesystem::create_directories(dir / "rirs");
  std::filesystem::create_directories(dir / "noise");

  AugmentFixture f{dir / "clean.csv", dir / "rirs.csv", dir / "noise.csv"};
  {
    std::ofstream os(f.clean_manifest);
    os << "utt_id,path\n";
    for (std::size_t i = 0; i < utterances; ++i) {
      const std::size_t n = 8000 + static_cast<std::size_t>(u(rng) * 24000);
      const double f0 = 100 + 150 * u(rng), rate = 2 + 4 * u(rng);
      std::vector<float> x(n);
      for (std::size_t t = 0; t < n; ++t) {
        const double time = t / 16000.0;
        const double env = 0.5 * (1 - std::cos(2 * 3.141592653589793 * rate * time));
        double v = 0;
        for (int h = 1; h <= 5; ++h) v += std::sin(2 * 3.141592653589793 * f0 * h * time) / h;
        x[t] = static_cast<float>(0.2 * env * v);
      }
      char id[32];
      std::snprintf(id, sizeof(id), "utt%04zu", i);
      SaveWav(x, 16000, dir / "clean" / (std::string(id) + ".wav"));
      os << id << ",clean/" << id << ".wav\n";
    }
  }
  {
    std::ofstream os(f.rir_pool);
    os << "id,source,path\n";
    for (std::size_t i = 0; i < rirs; ++i) {
      const double t60 = 0.2 + 0.6 * u(rng);
      const auto h = NoisyExponentialDecay(t60, 12000 + 6000 * (i % 2), 16000, rng, 1.0f);
      const std::string id = "rir" + std::to_string(i);
      SaveWav(h, 16000, dir / "rirs" / (id + ".wav"));
      os << id << ",GAS,rirs/" << id << ".wav\n";
    }
  }
  {
    std::ofstream os(f.noise_pool);
    os << "id,source,path\n";
    for (std::size_t i = 0; i < noises; ++i) {
      const int rate = i % 2 ? 8000 : 16000;
      const std::size_t n = static_cast<std::size_t>(rate * (0.3 + 0.7 * u(rng)));
      std::vector<float> x(n);
      double state = 0;
      for (auto& v : x) {
        state = 0.9 * state + 0.1 * g(rng);
        v = static_cast<float>(0.3 * state + 0.02 * g(rng));
      }
      const std::string id = "noise" + std::to_string(i);
      SaveWav(x, rate, dir / "noise" / (id + ".wav"));
      os << id << ",OTHER,noise/" << id << ".wav\n";
    }
  }
  return f;
}

MeasuredMix MeasureMix(const std::string& clean_path, const std::string& rir_path,
                       const std::string& noise_path, const std::string& out_path,
                       double rescale) {
  const AudioBuffer clean = LoadWav(clean_path);
  const Rir rir = ToRir(LoadWav(rir_path));
  AudioBuffer noise = LoadWav(noise_path);
  if (noise.sample_rate() != kRirSampleRate) noise = Resample(noise, kRirSampleRate);
  const AudioBuffer out = LoadWav(out_path);
  std::vector<float> rev = Convolve(clean.samples(), rir.samples());
  rev.resize(clean.size());
  double ps = 0, pn = 0;
  for (std::size_t i = 0; i < rev.size() && i < out.size(); ++i) {
    const double n = out.samples()[i] / rescale - rev[i];
    ps += static_cast<double>(rev[i]) * rev[i];
    pn += n * n;
  }
  return {10 * std::log10(ps / pn), noise.size(), out.size(), clean.size()};
}

double Power(std::span<const float> x) {
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

}  // namespace reverbgen::testing
