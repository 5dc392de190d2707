// Copyright 2026 The ppa-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// Keyed random streams. Every random draw in the library comes from a
/// stream derived from (seed, index, stage), so results never depend on
/// the order in which work items are scheduled.

#include <cstdint>
#include <random>

namespace ppa {

enum class StreamTag : std::uint64_t {
    detection = 1,
    outcome = 2,
    tomography = 3,
    instance = 4,
    grid = 5,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, StreamTag tag) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ index) ^ static_cast<std::uint64_t>(tag));
}

using Stream = std::mt19937_64;

inline Stream make_stream(std::uint64_t seed, std::uint64_t index, StreamTag tag) {
    return Stream(derive_seed(seed, index, tag));
}

}  // namespace ppa
