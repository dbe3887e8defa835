// Copyright 2026 The rtquad Authors
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

#include <cstdint>
#include <random>

namespace rtquad {

/// Engine used for every random draw in the library.
using Rng = std::mt19937_64;

/// Stream tags keep substreams for different purposes apart even when they
/// share a seed and an index.
enum class StreamTag : std::uint64_t {
    event = 1,
    stream_noise = 2,
    stream_heralds = 3,
    stream_source = 4,
    bootstrap = 5,
    test = 99,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key for substream `index` of `tag` under `seed`. Depends only on its
/// arguments, so substreams can be generated in any order.
constexpr std::uint64_t substream_key(std::uint64_t seed, StreamTag tag, std::uint64_t index) noexcept {
    return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(tag)) ^ index);
}

inline Rng make_substream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
    return Rng(substream_key(seed, tag, index));
}

}  // namespace rtquad
