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

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "reverbgen/gan/model.hpp"

namespace reverbgen::gan {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr int kFormatVersion = 1;
constexpr std::size_t kMagicLength = sizeof(kCheckpointMagic) - 1;

template <typename Net>
void DescribeLayers(const Net& net, nlohmann::json& layers) {
  for (const auto& t : net.layout())
    layers.push_back({{"name", t.name}, {"shape", t.shape}});
}

template <typename Net>
void CheckLayout(const Net& net, const nlohmann::json& layers, std::size_t& cursor,
                 const std::filesystem::path& path) {
  for (const auto& t : net.layout()) {
    if (cursor >= layers.size())
      throw CheckpointError(path.string() + ": header lists too few layers");
    const auto& entry = layers[cursor++];
    if (entry.at("name").get<std::string>() != t.name ||
        entry.at("shape").get<std::vector<int>>() != t.shape)
      throw CheckpointError(path.string() + ": layer " + t.name +
                            " does not match the declared architecture");
  }
}

}  // namespace

std::string PriorName(LatentPrior prior) {
  return prior == LatentPrior::kUniform ? "uniform" : "gaussian";
}

LatentPrior ParsePrior(const std::string& name) {
  if (name == "uniform") return LatentPrior::kUniform;
  if (name == "gaussian") return LatentPrior::kGaussian;
  throw std::invalid_argument("unknown latent prior '" + name + "'");
}

void SaveCheckpoint(const GanModel& model, const std::filesystem::path& path) {
  nlohmann::json header;
  header["format_version"] = kFormatVersion;
  header["d"] = model.model_size();
  header["step"] = model.step;
  header["seed"] = model.seed;
  header["latent_dim"] = kLatentDim;
  header["latent_prior"] = PriorName(model.prior);
  header["phase_shuffle_radius"] = model.critic.shuffle_radius();
  nlohmann::json layers = nlohmann::json::array();
  DescribeLayers(model.generator, layers);
  DescribeLayers(model.critic, layers);
  header["layers"] = layers;
  const std::string text = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CheckpointError("cannot open " + path.string() + " for writing");
  os.write(kCheckpointMagic, kMagicLength);
  const auto length = static_cast<std::uint32_t>(text.size());
  os.write(reinterpret_cast<const char*>(&length), sizeof(length));
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (auto params : {model.generator.params(), model.critic.params()})
    os.write(reinterpret_cast<const char*>(params.data()),
             static_cast<std::streamsize>(params.size_bytes()));
  if (!os) throw CheckpointError("write failed for " + path.string());
}

GanModel LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open " + path.string());
  char magic[kMagicLength];
  std::uint32_t length = 0;
  if (!is.read(magic, kMagicLength) || std::memcmp(magic, kCheckpointMagic, kMagicLength) != 0)
    throw CheckpointError(path.string() + ": missing IRGAN01 magic");
  if (!is.read(reinterpret_cast<char*>(&length), sizeof(length)))
    throw CheckpointError(path.string() + ": truncated header length");
  std::string text(length, '\0');
  if (!is.read(text.data(), length))
    throw CheckpointError(path.string() + ": truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path.string() + ": unreadable header: " + e.what());
  }
  if (header.value("format_version", 0) != kFormatVersion)
    throw CheckpointError(path.string() + ": unsupported format version");
  if (header.value("latent_dim", 0) != kLatentDim)
    throw CheckpointError(path.string() + ": unexpected latent dimension");

  GanModel model(header.at("d").get<int>(), header.at("phase_shuffle_radius").get<int>());
  model.step = header.at("step").get<std::int64_t>();
  model.seed = header.at("seed").get<std::uint64_t>();
  model.prior = ParsePrior(header.at("latent_prior").get<std::string>());

  const auto& layers = header.at("layers");
  std::size_t cursor = 0;
  CheckLayout(model.generator, layers, cursor, path);
  CheckLayout(model.critic, layers, cursor, path);
  if (cursor != layers.size())
    throw CheckpointError(path.string() + ": header lists extra layers");

  for (auto params : {model.generator.mutable_params(), model.critic.mutable_params()}) {
    if (!is.read(reinterpret_cast<char*>(params.data()),
                 static_cast<std::streamsize>(params.size_bytes())))
      throw CheckpointError(path.string() + ": truncated weight data");
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw CheckpointError(path.string() + ": trailing bytes after weights");
  return model;
}

}  // namespace reverbgen::gan
