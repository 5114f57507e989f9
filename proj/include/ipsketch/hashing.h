// Copyright 2026 The ipsketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IPSKETCH_HASHING_H_
#define IPSKETCH_HASHING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ipsketch/sparse_vector.h"

namespace ipsketch {

// splitmix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-dependent combination of two 64-bit words.
constexpr std::uint64_t HashCombine(std::uint64_t a, std::uint64_t b) {
  return Mix64(Mix64(a + 0x9e3779b97f4a7c15ULL) ^ (b + 0x632be59bd9b4e019ULL));
}

// 2^-53; the unit hash is a multiple of this.
inline constexpr double kUnitResolution = 1.0 / 9007199254740992.0;

// Seeded hash h: index -> [0, 1), uniform over {k / 2^53}.
//
// Every sketch in this library draws its coordination randomness from a
// UniformHasher, so two sketches built with the same seed see the same h(i)
// for every index i, on any machine.
class UniformHasher {
 public:
  constexpr explicit UniformHasher(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t seed() const { return seed_; }

  constexpr std::uint64_t Bits(Index i) const { return HashCombine(seed_, i); }

  constexpr double operator()(Index i) const {
    return static_cast<double>(Bits(i) >> 11) * kUnitResolution;
  }

 private:
  std::uint64_t seed_;
};

// h(i) for every stored entry of `a`, aligned with a.entries().
std::vector<double> HashSupport(const SparseVector& a,
                                const UniformHasher& hasher);

// Seed of trial `trial` derived from a master seed.
constexpr std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t trial) {
  return HashCombine(master ^ 0x5851f42d4c957f2dULL, trial);
}

}  // namespace ipsketch

#endif  // IPSKETCH_HASHING_H_
