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

// Command-line front end. Every subcommand writes its artifacts under
// --out-dir; tables go to stdout, diagnostics to stderr.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reverbgen/acoustic_params.hpp"
#include "reverbgen/audio.hpp"
#include "reverbgen/augment.hpp"
#include "reverbgen/corpus.hpp"
#include "reverbgen/gan/model.hpp"
#include "reverbgen/gan/trainer.hpp"
#include "reverbgen/sampler.hpp"
#include "reverbgen/wav_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace reverbgen;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  fs::path out_dir = ".";
  int threads = 1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

// Loads every pool entry as a canonical RIR; failures are reported and skipped.
std::vector<Rir> LoadRirs(const RirPool& pool, std::vector<std::string>* ids) {
  std::vector<Rir> rirs;
  for (const auto& e : pool.entries) {
    try {
      rirs.push_back(ToRir(LoadWav(e.path)));
      if (ids) ids->push_back(e.id);
    } catch (const std::exception& ex) {
      std::cerr << "skipping " << e.id << ": " << ex.what() << '\n';
    }
  }
  return rirs;
}

// Analysis failures are reported and skipped; histograms need decaying inputs.
std::vector<AcousticParams> AnalyzeAll(std::span<const Rir> rirs,
                                       std::span<const std::string> ids, std::ostream& csv) {
  std::vector<AcousticParams> params;
  WriteParamsCsvHeader(csv);
  for (std::size_t i = 0; i < rirs.size(); ++i) {
    try {
      params.push_back(Analyze(rirs[i]));
      WriteParamsCsvRow(csv, ids[i], params.back());
    } catch (const AcousticError& ex) {
      std::cerr << "cannot analyze " << ids[i] << ": " << ex.what() << '\n';
    }
  }
  return params;
}

int RunAnalyze(const GlobalOptions& g, const std::vector<fs::path>& inputs, bool raw) {
  std::ostringstream table;
  WriteParamsCsvHeader(table);
  int failures = 0;
  for (const auto& path : inputs) {
    try {
      const AudioBuffer audio = LoadWav(path);
      const AcousticParams p = raw ? Analyze(ResponseView(audio)) : Analyze(ToRir(audio));
      WriteParamsCsvRow(table, path.stem().string(), p);
    } catch (const std::exception& ex) {
      std::cerr << path.string() << ": " << ex.what() << '\n';
      ++failures;
    }
  }
  std::cout << table.str();
  fs::create_directories(g.out_dir);
  OpenOutput(g.out_dir / "params.csv") << table.str();
  return failures == 0 ? 0 : 1;
}

gan::TrainConfig ParseTrainConfig(const json& j) {
  static const std::set<std::string> kKeys = {
      "dataset",       "bins_per_param",  "learning_rate", "clip_c",         "n_critic",
      "batch_size",    "generator_steps", "seed",          "model_size",     "shuffle_radius",
      "rmsprop_decay", "rmsprop_epsilon", "checkpoint_every", "prior"};
  if (!j.is_object()) throw UsageError("train config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kKeys.count(key)) throw UsageError("unknown train config key '" + key + "'");
  gan::TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.clip_c = j.value("clip_c", c.clip_c);
  c.n_critic = j.value("n_critic", c.n_critic);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.generator_steps = j.value("generator_steps", c.generator_steps);
  c.seed = j.value("seed", c.seed);
  c.model_size = j.value("model_size", c.model_size);
  c.shuffle_radius = j.value("shuffle_radius", c.shuffle_radius);
  c.rmsprop_decay = j.value("rmsprop_decay", c.rmsprop_decay);
  c.rmsprop_epsilon = j.value("rmsprop_epsilon", c.rmsprop_epsilon);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  if (j.contains("prior")) c.prior = gan::ParsePrior(j.at("prior").get<std::string>());
  return c;
}

// Config keys: the TrainConfig fields by name, `dataset` (pool CSV, relative
// to the config file) and `bins_per_param` for the saved histograms.
int RunTrain(const GlobalOptions& g, const fs::path& config_path) {
  std::ifstream is(config_path);
  if (!is) throw UsageError("cannot read config " + config_path.string());
  const json j = json::parse(is);
  gan::TrainConfig config = ParseTrainConfig(j);
  if (g.seed) config.seed = *g.seed;
  if (!j.contains("dataset")) throw UsageError("train config needs a `dataset` pool");
  fs::path dataset = j.at("dataset").get<std::string>();
  if (dataset.is_relative()) dataset = config_path.parent_path() / dataset;

  fs::create_directories(g.out_dir);
  if (config.checkpoint_every > 0) config.checkpoint_dir = g.out_dir / "checkpoints";
  config.Validate();

  std::vector<std::string> ids;
  const std::vector<Rir> rirs = LoadRirs(RirPool::Load(dataset), &ids);
  if (rirs.empty()) throw UsageError("dataset has no loadable RIRs");

  std::ofstream params_csv = OpenOutput(g.out_dir / "train_params.csv");
  const std::vector<AcousticParams> params = AnalyzeAll(rirs, ids, params_csv);
  if (params.empty()) throw UsageError("no dataset RIR could be analyzed");
  SamplerConfig sampler;
  sampler.bins_per_param = j.value("bins_per_param", sampler.bins_per_param);
  BuildHistograms(params, sampler).Save(g.out_dir / "histograms.json");

  const gan::TrainResult result =
      gan::Train(config, rirs, [&](const gan::GeneratorStepRecord& r) {
        if (r.step % 50 == 0)
          std::cerr << "step " << r.step << " W " << r.wasserstein_estimate << '\n';
        return true;
      });
  gan::SaveCheckpoint(result.model, g.out_dir / "model.ckpt");
  std::ofstream log = OpenOutput(g.out_dir / "train_log.csv");
  result.log.WriteCsv(log);
  return 0;
}

int RunHistogram(const GlobalOptions& g, const fs::path& pool_path, int bins) {
  std::vector<std::string> ids;
  const std::vector<Rir> rirs = LoadRirs(RirPool::Load(pool_path), &ids);
  std::ostringstream table;
  const std::vector<AcousticParams> params = AnalyzeAll(rirs, ids, table);
  if (params.empty()) throw UsageError("no RIR in the pool could be analyzed");
  SamplerConfig config;
  config.bins_per_param = bins;
  fs::create_directories(g.out_dir);
  BuildHistograms(params, config).Save(g.out_dir / "histograms.json");
  OpenOutput(g.out_dir / "params.csv") << table.str();
  return 0;
}

struct GenerateOptions {
  fs::path model, hist;
  int count = 0;
  bool unconstrained = false;
  double relax_prob = SamplerConfig{}.relax_prob;
  int max_tries = SamplerConfig{}.max_tries_per_sample;
};

int RunGenerate(const GlobalOptions& g, const GenerateOptions& o) {
  const gan::GanModel model = gan::LoadCheckpoint(o.model);
  SamplerConfig config;
  config.seed = g.seed.value_or(0);
  config.workers = g.threads;
  config.relax_prob = o.relax_prob;
  config.max_tries_per_sample = o.max_tries;
  config.Validate();

  GenerationResult result;
  if (o.unconstrained) {
    result = GenerateUnconstrained(model, o.count, config);
  } else {
    if (o.hist.empty()) throw UsageError("--hist is required unless --unconstrained");
    result = GenerateConstrained(model, ParamHistograms::Load(o.hist), o.count, config);
  }

  const fs::path wav_dir = g.out_dir / "rirs";
  fs::create_directories(wav_dir);
  const SourceTag tag = o.unconstrained ? SourceTag::kGanU : SourceTag::kGanC;
  RirPool pool;
  pool.provenance.push_back("generate model=" + o.model.filename().string() +
                            " seed=" + std::to_string(config.seed) + " " + TagName(tag));
  std::ostringstream params;
  WriteParamsCsvHeader(params);
  for (std::size_t i = 0; i < result.rirs.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "gan%05zu", i);
    const fs::path path = wav_dir / (std::string(id) + ".wav");
    SaveWav(result.rirs[i].ToBuffer(), path);
    pool.entries.push_back({id, tag, path, ""});
    WriteParamsCsvRow(params, id, result.params[i]);
  }
  pool.Save(g.out_dir / "pool.csv");
  OpenOutput(g.out_dir / "params.csv") << params.str();
  std::ofstream report = OpenOutput(g.out_dir / "report.csv");
  result.report.WriteCsv(report);
  result.report.WriteCsv(std::cout);
  return 0;
}

struct AugmentOptions {
  fs::path clean, rirs, noise, spec;
};

int RunAugment(const GlobalOptions& g, const AugmentOptions& o) {
  AugmentSpec spec = AugmentSpec::FromJsonFile(o.spec);
  if (g.seed) spec.seed = *g.seed;
  spec.threads = g.threads;
  const auto clean = LoadCleanManifest(o.clean);
  const AugmentResult result = AugmentCorpus(clean, RirPool::Load(o.rirs),
                                             RirPool::Load(o.noise), spec, g.out_dir / "audio");
  std::ofstream manifest = OpenOutput(g.out_dir / "manifest.jsonl");
  WriteManifest(result.records, manifest);
  for (const auto& f : result.failures)
    std::cerr << "failed " << f.utt_id << ": " << f.message << '\n';
  std::cout << result.records.size() << " mixed, " << result.failures.size() << " failed\n";
  return result.failures.empty() ? 0 : 1;
}

std::array<std::size_t, 3> ParseSizes(const std::string& text) {
  std::array<std::size_t, 3> sizes{};
  std::istringstream is(text);
  std::string part;
  std::size_t n = 0;
  while (std::getline(is, part, ',')) {
    if (n == 3) throw UsageError("--sizes takes exactly three counts");
    std::size_t used = 0;
    const unsigned long long v = std::stoull(part, &used);
    if (used != part.size()) throw UsageError("bad size '" + part + "'");
    sizes[n++] = static_cast<std::size_t>(v);
  }
  if (n != 3) throw UsageError("--sizes takes exactly three counts");
  return sizes;
}

int RunSplit(const GlobalOptions& g, const fs::path& pool_path, const std::string& sizes,
             bool stratify) {
  SplitSpec spec;
  spec.sizes = ParseSizes(sizes);
  spec.seed = g.seed.value_or(0);
  spec.stratify = stratify;
  const SplitResult result = Split(RirPool::Load(pool_path), spec);
  fs::create_directories(g.out_dir);
  result.train.Save(g.out_dir / "train.csv");
  result.dev.Save(g.out_dir / "dev.csv");
  result.test.Save(g.out_dir / "test.csv");
  std::cout << "train " << result.train.size() << ", dev " << result.dev.size() << ", test "
            << result.test.size() << '\n';
  return 0;
}

int RunCompose(const GlobalOptions& g, const std::vector<std::string>& parts) {
  std::vector<RirPool> pools;
  std::vector<std::size_t> counts;
  pools.reserve(parts.size());
  for (const auto& p : parts) {
    const auto colon = p.rfind(':');
    if (colon == std::string::npos) throw UsageError("--pool expects csv:count, got " + p);
    pools.push_back(RirPool::Load(p.substr(0, colon)));
    counts.push_back(std::stoull(p.substr(colon + 1)));
  }
  std::vector<ComposeRequest> requests;
  for (std::size_t i = 0; i < pools.size(); ++i) requests.push_back({&pools[i], counts[i]});
  const RirPool out = ComposePool(requests, g.seed.value_or(0));
  fs::create_directories(g.out_dir);
  out.Save(g.out_dir / "pool.csv");
  for (const auto& [tag, n] : out.TagCounts()) std::cout << TagName(tag) << ' ' << n << '\n';
  return 0;
}

int RunValidate(const GlobalOptions& g, const fs::path& pool_path) {
  const ValidationReport report = ValidatePool(RirPool::Load(pool_path), g.threads);
  report.Write(std::cout);
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reverbgen: room impulse response analysis, generation and augmentation"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  app.add_option("--out-dir", g.out_dir, "Directory for every output artifact");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* analyze = app.add_subcommand("analyze", "Estimate T60, DRR, EDT and C50 of WAV files");
  std::vector<fs::path> analyze_inputs;
  bool raw = false;
  analyze->add_option("rir", analyze_inputs, "Impulse response WAV files")->required();
  analyze->add_flag("--raw", raw, "Analyze at native length and rate without canonicalizing");

  auto* train = app.add_subcommand("train", "Train the generator/critic pair");
  fs::path train_config;
  train->add_option("--config", train_config, "JSON training config")->required();

  auto* histogram = app.add_subcommand("histogram", "Build parameter histograms of a pool");
  fs::path hist_pool;
  int bins = SamplerConfig{}.bins_per_param;
  histogram->add_option("--pool", hist_pool, "Pool CSV")->required();
  histogram->add_option("--bins", bins, "Bins per parameter")->check(CLI::PositiveNumber);

  auto* generate = app.add_subcommand("generate", "Sample RIRs from a trained model");
  GenerateOptions gen;
  generate->add_option("--model", gen.model, "Checkpoint")->required();
  generate->add_option("--hist", gen.hist, "Histogram JSON constraining the output");
  generate->add_option("-n", gen.count, "Number of RIRs")->required()->check(CLI::PositiveNumber);
  generate->add_flag("--unconstrained", gen.unconstrained, "Skip the acceptance test");
  generate->add_option("--epsilon", gen.relax_prob, "Acceptance probability of adjacent misses")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--max-tries", gen.max_tries, "Tries per output slot before giving up")
      ->check(CLI::PositiveNumber);

  auto* augment = app.add_subcommand("augment", "Reverberate clean speech and add noise");
  AugmentOptions aug;
  augment->add_option("--clean", aug.clean, "Clean manifest CSV utt_id,path")->required();
  augment->add_option("--rirs", aug.rirs, "RIR pool CSV")->required();
  augment->add_option("--noise", aug.noise, "Noise pool CSV")->required();
  augment->add_option("--spec", aug.spec, "JSON augmentation spec")->required();

  auto* split = app.add_subcommand("split", "Partition a pool into train/dev/test");
  fs::path split_pool;
  std::string sizes;
  bool stratify = false;
  split->add_option("--pool", split_pool, "Pool CSV")->required();
  split->add_option("--sizes", sizes, "Counts a,b,c")->required();
  split->add_flag("--stratify", stratify, "Spread each group over the three subsets");

  auto* compose = app.add_subcommand("compose", "Subsample and concatenate pools");
  std::vector<std::string> compose_parts;
  compose->add_option("--pool", compose_parts, "csv:count, repeatable")->required();

  auto* validate = app.add_subcommand("validate", "Check a pool for duplicate or bad entries");
  fs::path validate_pool;
  validate->add_option("--pool", validate_pool, "Pool CSV")->required();

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*analyze) return RunAnalyze(g, analyze_inputs, raw);
    if (*train) return RunTrain(g, train_config);
    if (*histogram) return RunHistogram(g, hist_pool, bins);
    if (*generate) return RunGenerate(g, gen);
    if (*augment) return RunAugment(g, aug);
    if (*split) return RunSplit(g, split_pool, sizes, stratify);
    if (*compose) return RunCompose(g, compose_parts);
    if (*validate) return RunValidate(g, validate_pool);
  } catch (const UsageError& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
