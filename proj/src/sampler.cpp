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

#include "reverbgen/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace reverbgen {

const char* ParamName(Param p) {
  switch (p) {
    case Param::kT60: return "t60";
    case Param::kDrr: return "drr";
    case Param::kEdt: return "edt";
    case Param::kCte: return "cte";
  }
  return "?";
}

double ParamValue(const AcousticParams& p, Param which) {
  switch (which) {
    case Param::kT60: return p.t60;
    case Param::kDrr: return p.drr;
    case Param::kEdt: return p.edt;
    case Param::kCte: return p.cte;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Histogram

std::ptrdiff_t Histogram::BinOf(double v) const {
  if (!(v >= edges.front() && v <= edges.back())) return -1;
  const auto last = static_cast<std::ptrdiff_t>(counts.size()) - 1;
  auto idx = static_cast<std::ptrdiff_t>(std::floor((v - edges.front()) / bin_width()));
  idx = std::clamp<std::ptrdiff_t>(idx, 0, last);
  // Division rounding can land one bin off near an edge.
  while (idx > 0 && v < edges[idx]) --idx;
  while (idx < last && v >= edges[idx + 1]) ++idx;
  return idx;
}

bool Histogram::InSupport(double v) const {
  const auto idx = BinOf(v);
  return idx >= 0 && counts[idx] > 0;
}

double Histogram::DistanceToSupport(double v) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double lo = edges[i], hi = edges[i + 1];
    const double d = v < lo ? lo - v : (v > hi ? v - hi : 0.0);
    best = std::min(best, d);
  }
  return best;
}

void SamplerConfig::Validate() const {
  if (bins_per_param < 2) throw std::invalid_argument("bins_per_param must be >= 2");
  if (!(relax_prob >= 0.0 && relax_prob <= 1.0))
    throw std::invalid_argument("relax_prob must lie in [0, 1]");
  if (max_tries_per_sample < 1) throw std::invalid_argument("max_tries_per_sample must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

ParamHistograms BuildHistograms(std::span<const AcousticParams> params,
                                const SamplerConfig& config) {
  config.Validate();
  if (params.empty()) throw std::invalid_argument("cannot build histograms from no RIRs");
  ParamHistograms out;
  const int bins = config.bins_per_param;
  for (Param which : kAllParams) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : params) {
      const double v = ParamValue(p, which);
      if (!std::isfinite(v))
        throw std::invalid_argument(std::string("non-finite ") + ParamName(which) +
                                    " value in histogram input");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi == lo) {
      const double half = 0.5e-6 * std::max(1.0, std::abs(lo));
      lo -= half;
      hi += half;
    }
    Histogram& h = out.histograms[static_cast<std::size_t>(which)];
    h.edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    for (const auto& p : params) ++h.counts[h.BinOf(ParamValue(p, which))];
    h.total_count = static_cast<std::int64_t>(params.size());
  }
  return out;
}

void ParamHistograms::Save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["format"] = "reverbgen-histograms";
  j["version"] = 1;
  for (Param p : kAllParams) {
    const Histogram& h = (*this)[p];
    j["parameters"][ParamName(p)] = {
        {"edges", h.edges}, {"counts", h.counts}, {"total_count", h.total_count}};
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  // json::dump prints doubles in shortest round-trip form.
  os << j.dump(2) << '\n';
}

ParamHistograms ParamHistograms::Load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  const nlohmann::json j = nlohmann::json::parse(is);
  ParamHistograms out;
  for (Param p : kAllParams) {
    const auto& entry = j.at("parameters").at(ParamName(p));
    Histogram& h = out.histograms[static_cast<std::size_t>(p)];
    h.edges = entry.at("edges").get<std::vector<double>>();
    h.counts = entry.at("counts").get<std::vector<std::int64_t>>();
    h.total_count = entry.at("total_count").get<std::int64_t>();
    if (h.edges.size() < 3 || h.counts.size() + 1 != h.edges.size())
      throw std::runtime_error(path.string() + ": malformed histogram for " + ParamName(p));
    std::int64_t sum = 0;
    for (auto c : h.counts) sum += c;
    if (sum != h.total_count)
      throw std::runtime_error(path.string() + ": counts do not sum to total for " +
                               ParamName(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Acceptance

AcceptDecision Accept(const AcousticParams& p, const ParamHistograms& h,
                      double relax_prob, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  AcceptDecision d;
  bool all_adjacent = true;
  for (Param which : kAllParams) {
    const Histogram& hist = h[which];
    const double v = ParamValue(p, which);
    if (hist.InSupport(v)) continue;
    d.violations.push_back(which);
    if (!d.reason.empty()) d.reason += ',';
    d.reason += ParamName(which);
    if (!(hist.DistanceToSupport(v) <= hist.bin_width())) all_adjacent = false;
  }
  if (d.violations.empty()) {
    d.accepted = true;
  } else if (all_adjacent && u < relax_prob) {
    d.accepted = true;
    d.relaxed = true;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Generation

void GenerationReport::WriteCsv(std::ostream& os) const {
  os << "parameter,rejections\n";
  for (Param p : kAllParams) os << ParamName(p) << ',' << rejections[static_cast<std::size_t>(p)] << '\n';
  os << "analysis," << analysis_failures << '\n';
  os << "total_accepted," << accepted << '\n';
  os << "total_relaxed," << relaxed_accepts << '\n';
  os << "total_rejected," << rejected << '\n';
  os << "total_tries," << tries << '\n';
}

void GenerationReport::Merge(const GenerationReport& other) {
  for (std::size_t i = 0; i < rejections.size(); ++i) rejections[i] += other.rejections[i];
  analysis_failures += other.analysis_failures;
  accepted += other.accepted;
  relaxed_accepts += other.relaxed_accepts;
  rejected += other.rejected;
  tries += other.tries;
}

namespace {

// Runs one worker's share of the output slots.
struct Worker {
  const gan::GanModel& model;
  const ParamHistograms* histograms;  // null: unconstrained
  const SamplerConfig& config;
  std::mt19937_64 rng;
  GenerationReport report;

  // Null when the candidate cannot be canonicalized or analyzed.
  std::optional<Rir> Draw(AcousticParams& params) {
    const gan::LatentVector z = gan::SampleLatent(rng, model.prior);
    try {
      Rir rir = Rir::FromSamples(model.generator.Forward(z.z));
      params = Analyze(rir);
      return rir;
    } catch (const AudioError&) {
    } catch (const AcousticError&) {
    }
    ++report.analysis_failures;
    ++report.rejected;
    return std::nullopt;
  }

  void Fill(std::size_t slot, std::vector<std::optional<Rir>>& rirs,
            std::vector<AcousticParams>& params) {
    std::optional<Rir> rir;
    AcousticParams p;
    for (int attempt = 0;; ++attempt) {
      if (attempt == config.max_tries_per_sample) {
        std::ostringstream msg;
        msg << "acceptance collapsed: output " << slot << " exhausted "
            << config.max_tries_per_sample << " tries (" << report.accepted
            << " accepted, " << report.rejected << " rejected in this worker)";
        throw SamplerError(msg.str());
      }
      ++report.tries;
      rir = Draw(p);
      if (!rir) continue;
      if (histograms == nullptr) break;
      const AcceptDecision d = Accept(p, *histograms, config.relax_prob, rng);
      if (d.accepted) {
        if (d.relaxed) ++report.relaxed_accepts;
        break;
      }
      ++report.rejected;
      for (Param v : d.violations) ++report.rejections[static_cast<std::size_t>(v)];
    }
    ++report.accepted;
    rirs[slot] = std::move(rir);
    params[slot] = p;
  }
};

GenerationResult Generate(const gan::GanModel& model, const ParamHistograms* h, int n,
                          const SamplerConfig& config) {
  config.Validate();
  if (n < 1) throw std::invalid_argument("generation count must be >= 1");
  const int workers = std::min(config.workers, n);
  std::vector<std::optional<Rir>> rirs(n);
  std::vector<AcousticParams> params(n);
  std::vector<Worker> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.push_back(Worker{model, h, config, std::mt19937_64(config.seed + w), {}});

  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](int w) {
    try {
      for (int slot = w; slot < n; slot += workers) pool[w].Fill(slot, rirs, params);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  GenerationResult result;
  for (const auto& worker : pool) result.report.Merge(worker.report);
  result.rirs.reserve(n);
  for (auto& r : rirs) result.rirs.push_back(std::move(*r));
  result.params = std::move(params);
  return result;
}

}  // namespace

GenerationResult GenerateConstrained(const gan::GanModel& model, const ParamHistograms& h,
                                     int n, const SamplerConfig& config) {
  return Generate(model, &h, n, config);
}

GenerationResult GenerateUnconstrained(const gan::GanModel& model, int n,
                                       const SamplerConfig& config) {
  return Generate(model, nullptr, n, config);
}

}  // namespace reverbgen
