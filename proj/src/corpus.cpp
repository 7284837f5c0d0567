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

#include "reverbgen/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "reverbgen/audio.hpp"
#include "reverbgen/seed.hpp"
#include "reverbgen/wav_io.hpp"

namespace reverbgen {
namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

RirPool Subset(const RirPool& pool, std::span<const std::size_t> indices) {
  RirPool out;
  out.provenance = pool.provenance;
  out.entries.reserve(indices.size());
  for (std::size_t i : indices) out.entries.push_back(pool.entries[i]);
  return out;
}

}  // namespace

std::string TagName(SourceTag tag) {
  switch (tag) {
    case SourceTag::kBut: return "BUT";
    case SourceTag::kAir: return "AIR";
    case SourceTag::kGas: return "GAS";
    case SourceTag::kGanC: return "GAN.C";
    case SourceTag::kGanU: return "GAN.U";
    case SourceTag::kOther: return "OTHER";
  }
  return "OTHER";
}

SourceTag ParseTag(const std::string& name) {
  for (SourceTag t : {SourceTag::kBut, SourceTag::kAir, SourceTag::kGas, SourceTag::kGanC,
                      SourceTag::kGanU, SourceTag::kOther})
    if (TagName(t) == name) return t;
  throw CorpusError("unknown RIR source tag '" + name + "'");
}

std::map<SourceTag, std::size_t> RirPool::TagCounts() const {
  std::map<SourceTag, std::size_t> counts;
  for (const auto& e : entries) ++counts[e.source];
  return counts;
}

RirPool RirPool::Load(const std::filesystem::path& csv) {
  std::ifstream is(csv);
  if (!is) throw CorpusError("cannot open pool file " + csv.string());
  const std::filesystem::path base = std::filesystem::absolute(csv).parent_path();
  RirPool pool;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    if (line[0] == '#') {
      pool.provenance.push_back(Trim(line.substr(1)));
      continue;
    }
    auto fields = SplitCsvLine(line);
    for (auto& f : fields) f = Trim(f);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() >= 3 && fields[0] == "id" && fields[1] == "source" && fields[2] == "path")
        continue;
      throw CorpusError(csv.string() + ": expected header id,source,path[,group]");
    }
    if (fields.size() < 3 || fields.size() > 4)
      throw CorpusError(csv.string() + ":" + std::to_string(line_no) +
                        ": expected 3 or 4 comma-separated fields");
    PoolEntry e;
    e.id = fields[0];
    e.source = ParseTag(fields[1]);
    e.path = fields[2];
    if (e.path.is_relative()) e.path = base / e.path;
    if (fields.size() == 4) e.group = fields[3];
    pool.entries.push_back(std::move(e));
  }
  return pool;
}

void RirPool::Write(std::ostream& os) const {
  for (const auto& p : provenance) os << "# " << p << '\n';
  const bool groups = std::any_of(entries.begin(), entries.end(),
                                  [](const PoolEntry& e) { return !e.group.empty(); });
  os << (groups ? "id,source,path,group\n" : "id,source,path\n");
  for (const auto& e : entries) {
    os << e.id << ',' << TagName(e.source) << ',' << e.path.string();
    if (groups) os << ',' << e.group;
    os << '\n';
  }
}

void RirPool::Save(const std::filesystem::path& csv) const {
  // Absolute paths below the CSV's directory are stored relative to it.
  const std::filesystem::path base =
      std::filesystem::absolute(csv).parent_path().lexically_normal();
  RirPool out = *this;
  for (auto& e : out.entries) {
    if (e.path.is_relative()) continue;  // already relative to the CSV
    const auto rel = e.path.lexically_normal().lexically_relative(base);
    if (!rel.empty() && *rel.begin() != "..") e.path = rel;
  }
  std::ofstream os(csv);
  if (!os) throw CorpusError("cannot write pool file " + csv.string());
  out.Write(os);
}

SplitResult Split(const RirPool& pool, const SplitSpec& spec) {
  const std::size_t total = spec.sizes[0] + spec.sizes[1] + spec.sizes[2];
  if (total != pool.size())
    throw CorpusError("split sizes sum to " + std::to_string(total) + " but the pool has " +
                      std::to_string(pool.size()) + " entries");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::array<std::vector<std::size_t>, 3> parts;
  if (!spec.stratify) {
    auto it = order.begin();
    for (int s = 0; s < 3; ++s) {
      parts[s].assign(it, it + static_cast<std::ptrdiff_t>(spec.sizes[s]));
      it += static_cast<std::ptrdiff_t>(spec.sizes[s]);
    }
  } else {
    // Lay groups out contiguously (shuffled order within each group), then
    // deal subset labels with an evenly spread pattern of exact totals so
    // every group receives close to its proportional share of each subset.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pool.entries[a].group < pool.entries[b].group;
    });
    std::array<std::size_t, 3> dealt{};
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      // Pick the subset furthest behind its target share at this position.
      int best = -1;
      double best_deficit = 0.0;
      for (int s = 0; s < 3; ++s) {
        if (dealt[s] == spec.sizes[s]) continue;
        const double target = static_cast<double>(spec.sizes[s]) * (pos + 1) / total;
        const double deficit = target - static_cast<double>(dealt[s]);
        if (best < 0 || deficit > best_deficit) {
          best = s;
          best_deficit = deficit;
        }
      }
      parts[best].push_back(order[pos]);
      ++dealt[best];
    }
  }
  SplitResult out{Subset(pool, parts[0]), Subset(pool, parts[1]), Subset(pool, parts[2])};
  const std::string note = "split seed=" + std::to_string(spec.seed) + " sizes=" +
                           std::to_string(spec.sizes[0]) + "," + std::to_string(spec.sizes[1]) +
                           "," + std::to_string(spec.sizes[2]);
  out.train.provenance.push_back(note + " subset=train");
  out.dev.provenance.push_back(note + " subset=dev");
  out.test.provenance.push_back(note + " subset=test");
  return out;
}

RirPool ComposePool(std::span<const ComposeRequest> requests, std::uint64_t seed) {
  RirPool out;
  std::set<std::string> ids;
  for (std::size_t r = 0; r < requests.size(); ++r) {
    const RirPool& pool = *requests[r].pool;
    const std::size_t count = requests[r].count;
    if (count > pool.size())
      throw CorpusError("requested " + std::to_string(count) + " entries from a pool of " +
                        std::to_string(pool.size()));
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(DeriveSeed(seed, static_cast<std::uint64_t>(r)));
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(count);
    std::sort(order.begin(), order.end());
    for (std::size_t i : order) {
      const PoolEntry& e = pool.entries[i];
      if (!ids.insert(e.id).second)
        throw CorpusError("composed pool would contain duplicate id '" + e.id + "'");
      out.entries.push_back(e);
    }
    out.provenance.push_back("compose part " + std::to_string(r) + ": " +
                             std::to_string(count) + " of " + std::to_string(pool.size()));
  }
  out.provenance.push_back("compose seed=" + std::to_string(seed));
  return out;
}

void ValidationReport::Write(std::ostream& os) const {
  for (const auto& [tag, n] : counts) os << "count " << TagName(tag) << ' ' << n << '\n';
  for (const auto& f : findings) {
    const char* kind = f.kind == FindingKind::kDuplicateId   ? "duplicate-id"
                       : f.kind == FindingKind::kMissingFile ? "missing-file"
                                                             : "unloadable";
    os << kind << ' ' << f.id << ": " << f.message << '\n';
  }
  os << (ok() ? "OK" : "FAILED") << ' ' << findings.size() << " finding(s)\n";
}

ValidationReport ValidatePool(const RirPool& pool, int threads) {
  ValidationReport report;
  report.counts = pool.TagCounts();
  std::set<std::string> seen;
  for (const auto& e : pool.entries)
    if (!seen.insert(e.id).second)
      report.findings.push_back({FindingKind::kDuplicateId, e.id, "id appears more than once"});

  // Per-entry file checks; each slot is written by exactly one worker.
  std::vector<std::optional<Finding>> file_findings(pool.size());
  auto check = [&](std::size_t i) {
    const PoolEntry& e = pool.entries[i];
    std::error_code ec;
    if (!std::filesystem::exists(e.path, ec)) {
      file_findings[i] = Finding{FindingKind::kMissingFile, e.id, e.path.string() + " not found"};
      return;
    }
    try {
      (void)ToRir(LoadWav(e.path));
    } catch (const std::exception& ex) {
      file_findings[i] = Finding{FindingKind::kUnloadable, e.id, ex.what()};
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || pool.size() < 2) {
    for (std::size_t i = 0; i < pool.size(); ++i) check(i);
  } else {
    std::vector<std::thread> ts;
    for (std::size_t w = 0; w < workers; ++w)
      ts.emplace_back([&, w] {
        for (std::size_t i = w; i < pool.size(); i += workers) check(i);
      });
    for (auto& t : ts) t.join();
  }
  for (auto& f : file_findings)
    if (f) report.findings.push_back(std::move(*f));
  return report;
}

}  // namespace reverbgen
