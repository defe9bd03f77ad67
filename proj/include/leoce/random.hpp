// SPDX-License-Identifier: Apache-2.0
//
// leoce - channel estimation toolkit for LEO satellite massive MIMO OFDM uplinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "leoce/common.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace leoce {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds a base seed and a list of stream coordinates (trial index, sweep
// point, purpose tag, ...) into one 64-bit seed. Order of coordinates matters.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords)
{
    std::uint64_t h = mix64(base);
    for (std::uint64_t c : coords)
        h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    return h;
}

// Stream tags, so different consumers of one base seed never share a stream.
enum class Stream : std::uint64_t {
    population = 1,
    allocation = 2,
    trial = 3,
};

inline Rng make_rng(std::uint64_t base, Stream tag, std::initializer_list<std::uint64_t> coords = {})
{
    std::uint64_t h = derive_seed(base, {static_cast<std::uint64_t>(tag)});
    for (std::uint64_t c : coords)
        h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    return Rng(h);
}

// Circularly symmetric complex Gaussian with E|z|^2 = variance.
inline cplx complex_gaussian(Rng &rng, double variance)
{
    std::normal_distribution<double> n(0.0, 1.0);
    const double s = std::sqrt(variance / 2.0);
    const double re = n(rng);
    const double im = n(rng);
    return {s * re, s * im};
}

inline double uniform01(Rng &rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace leoce
