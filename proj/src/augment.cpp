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

#include "reverbgen/augment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "reverbgen/convolve.hpp"
#include "reverbgen/resample.hpp"
#include "reverbgen/seed.hpp"
#include "reverbgen/wav_io.hpp"

namespace reverbgen {
namespace {

double MeanSquare(std::span<const float> x) {
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return acc / static_cast<double>(x.size());
}

AudioBuffer LoadAt(const std::filesystem::path& path, int rate) {
  AudioBuffer b = LoadWav(path);
  return b.sample_rate() == rate ? b : Resample(b, rate);
}

}  // namespace

void AugmentSpec::Validate() const {
  if (!(snr_lo > 0.0 || units == SnrUnits::kDecibel))
    throw std::invalid_argument("linear SNR lower bound must be > 0");
  if (!(snr_lo <= snr_hi)) throw std::invalid_argument("SNR range must satisfy lo <= hi");
  if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

AugmentSpec AugmentSpec::FromJsonFile(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open augment spec " + path.string());
  const nlohmann::json j = nlohmann::json::parse(is);
  if (!j.is_object()) throw std::invalid_argument("augment spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "snr_range" && key != "snr_units" && key != "seed" && key != "sample_rate" &&
        key != "threads")
      throw std::invalid_argument("unknown augment spec key '" + key + "'");
  }
  AugmentSpec spec;
  if (j.contains("snr_range")) {
    const auto range = j.at("snr_range").get<std::vector<double>>();
    if (range.size() != 2) throw std::invalid_argument("snr_range must have two values");
    spec.snr_lo = range[0];
    spec.snr_hi = range[1];
  }
  const std::string units = j.value("snr_units", std::string("linear"));
  if (units == "linear")
    spec.units = SnrUnits::kLinear;
  else if (units == "db")
    spec.units = SnrUnits::kDecibel;
  else
    throw std::invalid_argument("snr_units must be 'linear' or 'db'");
  spec.seed = j.value("seed", spec.seed);
  spec.sample_rate = j.value("sample_rate", spec.sample_rate);
  spec.threads = j.value("threads", spec.threads);
  spec.Validate();
  return spec;
}

std::vector<float> LoopedNoise(std::span<const float> noise, std::size_t k, std::size_t length) {
  if (noise.empty()) throw std::invalid_argument("noise is empty");
  if (k >= noise.size())
    throw std::out_of_range("noise offset " + std::to_string(k) + " outside noise of length " +
                            std::to_string(noise.size()));
  std::vector<float> out(length);
  std::size_t pos = k;
  for (std::size_t i = 0; i < length; ++i) {
    out[i] = noise[pos];
    if (++pos == noise.size()) pos = 0;
  }
  return out;
}

double ComputeAlpha(std::span<const float> reverberant, std::span<const float> noise_segment,
                    double snr) {
  if (reverberant.empty() || noise_segment.empty())
    throw std::invalid_argument("alpha needs non-empty signal and noise");
  if (reverberant.size() != noise_segment.size())
    throw std::invalid_argument("signal and noise segment lengths differ");
  if (!(snr > 0.0)) throw std::invalid_argument("SNR must be positive");
  const double noise_power = MeanSquare(noise_segment);
  if (noise_power == 0.0) throw std::invalid_argument("noise segment has zero power");
  return std::sqrt(MeanSquare(reverberant) / (snr * noise_power));
}

MixResult Mix(const AudioBuffer& clean, const Rir& rir, const AudioBuffer& noise, double snr,
              std::size_t k, std::optional<double> alpha_override) {
  if (clean.sample_rate() != Rir::sample_rate() || noise.sample_rate() != Rir::sample_rate())
    throw AudioError(AudioErrorKind::kRateMismatch, "mix inputs must all be at 16 kHz");
  std::vector<float> y = Convolve(clean.samples(), rir.samples());
  y.resize(clean.size());

  const std::vector<float> segment = LoopedNoise(noise.samples(), k, y.size());
  const double alpha = alpha_override ? *alpha_override : ComputeAlpha(y, segment, snr);
  if (alpha != 0.0) {
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = static_cast<float>(y[i] + alpha * segment[i]);
  }
  double rescale = 1.0;
  const float peak = PeakAbs(y);
  if (peak > 1.0f) {
    rescale = 1.0 / peak;
    for (float& v : y) v = static_cast<float>(v * rescale);
  }
  return {AudioBuffer(std::move(y), clean.sample_rate()), alpha, rescale};
}

std::vector<CleanUtterance> LoadCleanManifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw CorpusError("cannot open clean manifest " + path.string());
  std::vector<CleanUtterance> out;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("utt_id,", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw CorpusError(path.string() + ": expected utt_id,path rows");
    CleanUtterance u{line.substr(0, comma), line.substr(comma + 1)};
    if (u.path.is_relative()) u.path = path.parent_path() / u.path;
    out.push_back(std::move(u));
  }
  return out;
}

AugmentResult AugmentCorpus(std::span<const CleanUtterance> clean, const RirPool& rirs,
                            const RirPool& noises, const AugmentSpec& spec,
                            const std::filesystem::path& out_dir) {
  spec.Validate();
  if (rirs.size() == 0 || noises.size() == 0)
    throw std::invalid_argument("RIR and noise pools must be non-empty");
  if (spec.sample_rate != kRirSampleRate)
    throw std::invalid_argument("augmentation output rate must be 16000 Hz");
  std::filesystem::create_directories(out_dir);

  std::vector<std::optional<MixRecord>> records(clean.size());
  std::vector<std::optional<AugmentFailure>> failures(clean.size());

  auto process = [&](std::size_t i) {
    const CleanUtterance& utt = clean[i];
    try {
      std::mt19937_64 rng(DeriveSeed(spec.seed, utt.utt_id));
      const PoolEntry& rir_entry =
          rirs.entries[std::uniform_int_distribution<std::size_t>(0, rirs.size() - 1)(rng)];
      const PoolEntry& noise_entry =
          noises.entries[std::uniform_int_distribution<std::size_t>(0, noises.size() - 1)(rng)];
      double snr = std::uniform_real_distribution<double>(spec.snr_lo, spec.snr_hi)(rng);
      if (spec.units == SnrUnits::kDecibel) snr = std::pow(10.0, snr / 10.0);

      const AudioBuffer speech = LoadAt(utt.path, spec.sample_rate);
      const AudioBuffer noise = LoadAt(noise_entry.path, spec.sample_rate);
      const Rir rir = ToRir(LoadWav(rir_entry.path));
      const std::size_t k =
          std::uniform_int_distribution<std::size_t>(0, noise.size() - 1)(rng);

      MixResult mixed = Mix(speech, rir, noise, snr, k);
      const std::filesystem::path out_path = out_dir / (utt.utt_id + ".wav");
      SaveWav(mixed.audio, out_path);
      records[i] = MixRecord{utt.utt_id, utt.path.string(), rir_entry.id, noise_entry.id, snr,
                             k, mixed.alpha, mixed.rescale, out_path.string()};
    } catch (const std::exception& e) {
      failures[i] = AugmentFailure{utt.utt_id, e.what()};
    }
  };

  const auto workers = static_cast<std::size_t>(spec.threads);
  if (workers == 1 || clean.size() < 2) {
    for (std::size_t i = 0; i < clean.size(); ++i) process(i);
  } else {
    std::vector<std::thread> ts;
    for (std::size_t w = 0; w < workers; ++w)
      ts.emplace_back([&, w] {
        for (std::size_t i = w; i < clean.size(); i += workers) process(i);
      });
    for (auto& t : ts) t.join();
  }

  AugmentResult result;
  for (auto& r : records)
    if (r) result.records.push_back(std::move(*r));
  for (auto& f : failures)
    if (f) result.failures.push_back(std::move(*f));
  std::sort(result.records.begin(), result.records.end(),
            [](const MixRecord& a, const MixRecord& b) { return a.utt_id < b.utt_id; });
  return result;
}

void WriteManifest(std::span<const MixRecord> records, std::ostream& os) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["utt_id"] = r.utt_id;
    j["clean_path"] = r.clean_path;
    j["rir_id"] = r.rir_id;
    j["noise_id"] = r.noise_id;
    j["snr"] = r.snr;
    j["k"] = r.k;
    j["alpha"] = r.alpha;
    j["rescale"] = r.rescale;
    j["out_path"] = r.out_path;
    os << j.dump() << '\n';
  }
}

std::vector<MixRecord> ReadManifest(std::istream& is) {
  std::vector<MixRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    MixRecord r;
    r.utt_id = j.at("utt_id").get<std::string>();
    r.clean_path = j.at("clean_path").get<std::string>();
    r.rir_id = j.at("rir_id").get<std::string>();
    r.noise_id = j.at("noise_id").get<std::string>();
    r.snr = j.at("snr").get<double>();
    r.k = j.at("k").get<std::size_t>();
    r.alpha = j.at("alpha").get<double>();
    r.rescale = j.at("rescale").get<double>();
    r.out_path = j.at("out_path").get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace reverbgen
