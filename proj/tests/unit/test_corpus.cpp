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

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "reverbgen/corpus.hpp"
#include "reverbgen/wav_io.hpp"
#include "support.hpp"

using namespace reverbgen;
using testing::ScopedTempDir;

namespace {

RirPool MakePool(std::size_t n, SourceTag tag = SourceTag::kBut, const std::string& prefix = "r",
                 std::size_t groups = 0) {
  RirPool p;
  for (std::size_t i = 0; i < n; ++i) {
    PoolEntry e{prefix + std::to_string(i), tag, "rirs/" + prefix + std::to_string(i) + ".wav", ""};
    if (groups > 0) e.group = "room" + std::to_string(i % groups);
    p.entries.push_back(e);
  }
  return p;
}

std::vector<std::string> Ids(const RirPool& p) {
  std::vector<std::string> ids;
  for (const auto& e : p.entries) ids.push_back(e.id);
  return ids;
}

void CheckPartition(const RirPool& pool, const SplitResult& s,
                    const std::array<std::size_t, 3>& sizes) {
  CHECK(s.train.size() == sizes[0]);
  CHECK(s.dev.size() == sizes[1]);
  CHECK(s.test.size() == sizes[2]);
  std::multiset<std::string> all;
  for (const RirPool* part : {&s.train, &s.dev, &s.test})
    for (const auto& e : part->entries) all.insert(e.id);
  const auto ids = Ids(pool);
  CHECK(all == std::multiset<std::string>(ids.begin(), ids.end()));
}

}  // namespace

TEST_CASE("tags round-trip") {
  for (SourceTag t : {SourceTag::kBut, SourceTag::kAir, SourceTag::kGas, SourceTag::kGanC,
                      SourceTag::kGanU, SourceTag::kOther})
    CHECK(ParseTag(TagName(t)) == t);
  CHECK(TagName(SourceTag::kGanC) == "GAN.C");
  CHECK_THROWS_AS(ParseTag("gan.c"), CorpusError);
}

TEST_CASE("pool csv round-trip with provenance and groups") {
  ScopedTempDir dir;
  RirPool p = MakePool(3, SourceTag::kAir, "a", 2);
  p.provenance = {"collected 2026", "second note"};
  p.entries[1].path = dir.path() / "abs.wav";
  p.Save(dir / "pool.csv");
  const RirPool back = RirPool::Load(dir / "pool.csv");
  CHECK(back.provenance == p.provenance);
  REQUIRE(back.size() == 3);
  CHECK(back.entries[0].path == dir.path() / "rirs/a0.wav");
  CHECK(back.entries[1].path == dir.path() / "abs.wav");
  CHECK(back.entries[2].group == "room0");
  CHECK(back.TagCounts() == std::map<SourceTag, std::size_t>{{SourceTag::kAir, 3}});
}

TEST_CASE("saved paths stay valid wherever the csv is written") {
  ScopedTempDir dir;
  RirPool p;
  p.entries.push_back({"in", SourceTag::kGas, dir / "sub" / "rirs" / "a.wav", ""});
  p.entries.push_back({"out", SourceTag::kGas, dir / "b.wav", ""});
  std::filesystem::create_directories(dir / "sub");
  p.Save(dir / "sub" / "pool.csv");
  std::ifstream is(dir / "sub" / "pool.csv");
  std::string header, in_line, out_line;
  std::getline(is, header);
  std::getline(is, in_line);
  std::getline(is, out_line);
  CHECK(in_line == "in,GAS,rirs/a.wav");
  CHECK(out_line == "out,GAS," + (dir / "b.wav").string());
  const RirPool back = RirPool::Load(dir / "sub" / "pool.csv");
  CHECK(back.entries[0].path.lexically_normal() == (dir / "sub" / "rirs" / "a.wav"));
  CHECK(back.entries[1].path == dir / "b.wav");
}

TEST_CASE("malformed pool files are rejected") {
  ScopedTempDir dir;
  { std::ofstream(dir / "nohdr.csv") << "x,BUT,a.wav\n"; }
  CHECK_THROWS_AS(RirPool::Load(dir / "nohdr.csv"), CorpusError);
  { std::ofstream(dir / "tag.csv") << "id,source,path\nx,XYZ,a.wav\n"; }
  CHECK_THROWS_AS(RirPool::Load(dir / "tag.csv"), CorpusError);
  { std::ofstream(dir / "fields.csv") << "id,source,path\nx,BUT\n"; }
  CHECK_THROWS_AS(RirPool::Load(dir / "fields.csv"), CorpusError);
  CHECK_THROWS_AS(RirPool::Load(dir / "absent.csv"), CorpusError);
  { std::ofstream(dir / "crlf.csv") << "id,source,path\r\n x , GAS , b.wav \r\n\r\n"; }
  const RirPool ok = RirPool::Load(dir / "crlf.csv");
  REQUIRE(ok.size() == 1);
  CHECK(ok.entries[0].id == "x");
  CHECK(ok.entries[0].source == SourceTag::kGas);
}

TEST_CASE("split of 1209 into 773/194/242") {
  const RirPool pool = MakePool(1209);
  const SplitResult s = Split(pool, {{773, 194, 242}, 2021});
  CheckPartition(pool, s, {773, 194, 242});
  CHECK(s.train.provenance.back().find("seed=2021") != std::string::npos);
  CHECK(s.test.provenance.back().find("subset=test") != std::string::npos);
}

TEST_CASE("degenerate split") {
  const RirPool pool = MakePool(3);
  const SplitResult s = Split(pool, {{3, 0, 0}, 1});
  CHECK(s.train.size() == 3);
  CHECK(s.dev.size() == 0);
  CHECK(s.test.size() == 0);
  CHECK_THROWS_AS(Split(pool, {{2, 0, 0}, 1}), CorpusError);
}

TEST_CASE("split determinism and seed sensitivity") {
  const RirPool pool = MakePool(20);
  const SplitResult a = Split(pool, {{10, 5, 5}, 7});
  const SplitResult b = Split(pool, {{10, 5, 5}, 7});
  const SplitResult c = Split(pool, {{10, 5, 5}, 8});
  CHECK(Ids(a.train) == Ids(b.train));
  CHECK(Ids(a.dev) == Ids(b.dev));
  CHECK(Ids(a.test) == Ids(b.test));
  CHECK((Ids(a.train) != Ids(c.train) || Ids(a.dev) != Ids(c.dev)));
}

TEST_CASE("split is a partition for random pools and sizes") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t a = rng() % (n + 1), b = rng() % (n - a + 1);
    const std::array<std::size_t, 3> sizes{a, b, n - a - b};
    const RirPool pool = MakePool(n, SourceTag::kBut, "r", trial % 3 == 0 ? 7 : 0);
    CheckPartition(pool, Split(pool, {sizes, rng(), trial % 2 == 0}), sizes);
  }
}

TEST_CASE("stratified split spreads groups proportionally") {
  const RirPool pool = MakePool(1000, SourceTag::kBut, "r", 10);
  const SplitResult s = Split(pool, {{600, 200, 200}, 4, true});
  CheckPartition(pool, s, {600, 200, 200});
  std::map<std::string, int> train_per_group;
  for (const auto& e : s.train.entries) ++train_per_group[e.group];
  for (const auto& [g, n] : train_per_group) CHECK(std::abs(n - 60) <= 1);
}

TEST_CASE("compose equal mixture") {
  const RirPool gan = MakePool(800, SourceTag::kGanC, "g");
  const RirPool gas = MakePool(900, SourceTag::kGas, "s");
  const ComposeRequest req[] = {{&gan, 773}, {&gas, 773}};
  const RirPool mix = ComposePool(req, 5);
  CHECK(mix.size() == 1546);
  CHECK(mix.TagCounts() == std::map<SourceTag, std::size_t>{{SourceTag::kGas, 773},
                                                             {SourceTag::kGanC, 773}});
  const auto again = ComposePool(req, 5);
  CHECK(Ids(again) == Ids(mix));
  const auto ids = Ids(mix);
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 1546);
}

TEST_CASE("compose identity, determinism and errors") {
  const RirPool a = MakePool(5, SourceTag::kAir, "a"), b = MakePool(5, SourceTag::kBut, "b");
  const ComposeRequest full[] = {{&a, 5}};
  CHECK(ComposePool(full, 1).entries == a.entries);

  const ComposeRequest small[] = {{&a, 2}, {&b, 1}};
  const RirPool x = ComposePool(small, 9), y = ComposePool(small, 9);
  CHECK(x.size() == 3);
  CHECK(x.entries == y.entries);
  CHECK(x.entries[2].source == SourceTag::kBut);

  const ComposeRequest twice = {&a, 6};
  CHECK_THROWS_AS(ComposePool(std::span(&twice, 1), 1), CorpusError);
  const ComposeRequest dup[] = {{&a, 5}, {&a, 1}};
  CHECK_THROWS_AS(ComposePool(dup, 1), CorpusError);
}

TEST_CASE("compose size and tags match requests") {
  std::mt19937_64 rng(6);
  const RirPool p1 = MakePool(40, SourceTag::kGanC, "c"), p2 = MakePool(30, SourceTag::kGanU, "u"),
                p3 = MakePool(20, SourceTag::kGas, "s");
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n1 = rng() % 41, n2 = rng() % 31, n3 = rng() % 21;
    const ComposeRequest req[] = {{&p1, n1}, {&p2, n2}, {&p3, n3}};
    const RirPool out = ComposePool(req, rng());
    CHECK(out.size() == n1 + n2 + n3);
    auto counts = out.TagCounts();
    CHECK(counts[SourceTag::kGanC] == n1);
    CHECK(counts[SourceTag::kGanU] == n2);
    CHECK(counts[SourceTag::kGas] == n3);
  }
}

TEST_CASE("validation reports findings") {
  ScopedTempDir dir;
  std::filesystem::create_directories(dir / "rirs");
  RirPool pool = MakePool(68, SourceTag::kAir, "air");
  std::mt19937_64 rng(7);
  for (auto& e : pool.entries) {
    e.path = dir.path() / e.path;
    SaveWav(testing::NoisyExponentialDecay(0.3, 4000, 16000, rng), 16000, e.path);
  }
  const ValidationReport healthy = ValidatePool(pool, 3);
  CHECK(healthy.ok());
  CHECK(healthy.counts == std::map<SourceTag, std::size_t>{{SourceTag::kAir, 68}});

  pool.entries[3].path = dir.path() / "missing.wav";
  pool.entries[5].id = pool.entries[4].id;
  { std::ofstream(dir / "rirs" / "bad.wav") << "not audio"; }
  pool.entries[9].path = dir.path() / "rirs" / "bad.wav";
  SaveWav(std::vector<float>(10, 0.0f), 16000, dir / "rirs" / "silent.wav");
  pool.entries[10].path = dir.path() / "rirs" / "silent.wav";
  const ValidationReport r = ValidatePool(pool, 2);
  CHECK_FALSE(r.ok());
  std::map<FindingKind, int> kinds;
  for (const auto& f : r.findings) ++kinds[f.kind];
  CHECK(kinds[FindingKind::kDuplicateId] == 1);
  CHECK(kinds[FindingKind::kMissingFile] == 1);
  CHECK(kinds[FindingKind::kUnloadable] == 2);
  std::ostringstream os;
  r.Write(os);
  CHECK(os.str().find("missing-file air3") != std::string::npos);
  CHECK(os.str().find("FAILED 4 finding(s)") != std::string::npos);
  // Thread count does not change the report.
  const ValidationReport r1 = ValidatePool(pool, 1);
  REQUIRE(r1.findings.size() == r.findings.size());
  for (std::size_t i = 0; i < r.findings.size(); ++i) CHECK(r1.findings[i].id == r.findings[i].id);
}
