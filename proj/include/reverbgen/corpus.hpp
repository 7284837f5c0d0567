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

#ifndef REVERBGEN_CORPUS_HPP_
#define REVERBGEN_CORPUS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace reverbgen {

enum class SourceTag { kBut, kAir, kGas, kGanC, kGanU, kOther };

std::string TagName(SourceTag tag);
SourceTag ParseTag(const std::string& name);

struct PoolEntry {
  std::string id;
  SourceTag source = SourceTag::kOther;
  std::filesystem::path path;
  std::string group;  // optional stratification key, e.g. a room id

  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RirPool {
  std::vector<PoolEntry> entries;
  std::vector<std::string> provenance;  // free-form `# ...` header lines

  std::size_t size() const noexcept { return entries.size(); }
  std::map<SourceTag, std::size_t> TagCounts() const;

  /// CSV `id,source,path[,group]`, `#` lines kept as provenance. Relative
  /// paths are resolved against the CSV's directory, so loaded paths are
  /// absolute.
  static RirPool Load(const std::filesystem::path& csv);
  /// Relative entries are written as given; absolute ones below the CSV's
  /// directory are written relative to it.
  void Save(const std::filesystem::path& csv) const;
  void Write(std::ostream& os) const;
};

struct SplitSpec {
  std::array<std::size_t, 3> sizes{};  // train, dev, test
  std::uint64_t seed = 0;
  // Spread each group proportionally over the three subsets.
  bool stratify = false;
};

struct SplitResult {
  RirPool train, dev, test;
};

/// Seeded uniform shuffle, then partition by counts. Throws CorpusError when
/// the sizes do not sum to the pool size.
SplitResult Split(const RirPool& pool, const SplitSpec& spec);

struct ComposeRequest {
  const RirPool* pool;
  std::size_t count;
};

/// Seeded uniform subsample of each pool (pool i uses a stream derived from
/// seed and i), concatenated in request order; entries keep their tags.
RirPool ComposePool(std::span<const ComposeRequest> requests, std::uint64_t seed);

enum class FindingKind { kDuplicateId, kMissingFile, kUnloadable };

struct Finding {
  FindingKind kind;
  std::string id;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  std::map<SourceTag, std::size_t> counts;

  bool ok() const noexcept { return findings.empty(); }
  void Write(std::ostream& os) const;
};

/// Checks unique ids, file existence, and loadability as a canonical RIR.
ValidationReport ValidatePool(const RirPool& pool, int threads = 1);

}  // namespace reverbgen

#endif  // REVERBGEN_CORPUS_HPP_
