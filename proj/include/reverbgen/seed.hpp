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

#ifndef REVERBGEN_SEED_HPP_
#define REVERBGEN_SEED_HPP_

#include <cstdint>
#include <string_view>

namespace reverbgen {

/// splitmix64 finalizer.
std::uint64_t MixSeed(std::uint64_t x) noexcept;

/// Stable 64-bit FNV-1a of a string.
std::uint64_t HashString(std::string_view s) noexcept;

/// Independent sub-stream seeds, stable across platforms and runs.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view tag) noexcept;
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace reverbgen

#endif  // REVERBGEN_SEED_HPP_
