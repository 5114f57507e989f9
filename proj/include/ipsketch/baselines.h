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

#ifndef IPSKETCH_BASELINES_H_
#define IPSKETCH_BASELINES_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "ipsketch/sparse_vector.h"

namespace ipsketch {

enum class LinearKind : std::uint8_t { kJl = 1, kCountSketch = 2 };

std::string_view LinearKindTag(LinearKind kind);  // "jl" / "countsketch"

// S(a) = Pi a for a seeded random m x n matrix Pi.
struct LinearSketch {
  LinearKind kind = LinearKind::kJl;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  Index universe_size = 1;
  std::vector<double> coords;  // length m

  friend bool operator==(const LinearSketch&, const LinearSketch&) = default;
};

// Dense projection with entries +-1/sqrt(m) (the AMS / JL sketch). O(N m).
LinearSketch JlSketch(const SparseVector& a, std::uint64_t seed,
                      std::uint64_t m);

// One-repetition CountSketch: coords[bucket(i)] += sign(i) * a_i. O(N).
LinearSketch CountSketch(const SparseVector& a, std::uint64_t seed,
                         std::uint64_t m);

LinearSketch MakeLinearSketch(LinearKind kind, const SparseVector& a,
                              std::uint64_t seed, std::uint64_t m);

// <S(a), S(b)>. Throws ContractError on mismatched kind / m / seed.
double LinearEstimate(const LinearSketch& sa, const LinearSketch& sb);

// m words: every coordinate is one 64-bit double.
inline double StorageWords(const LinearSketch& s) {
  return static_cast<double>(s.m);
}

// Unweighted MinHash sampling: for each of m independent hash functions
// keep the support index with the smallest hash.
struct MinHashSketch {
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  Index universe_size = 1;
  std::vector<double> min_hash;    // 1.0 when the vector is empty
  std::vector<Index> min_index;
  std::vector<double> min_value;

  friend bool operator==(const MinHashSketch&, const MinHashSketch&) = default;
};

MinHashSketch MinHash(const SparseVector& a, std::uint64_t seed,
                      std::uint64_t m);

struct MinHashEstimate {
  double estimate = 0.0;
  double union_size = 0.0;
  std::size_t matched = 0;
};

// Repetitions whose minimizers coincide are uniform samples from
// supp(a) ∩ supp(b) drawn out of the union; the estimate is
//   (U_hat / m) * sum over matched repetitions of a_i b_i,
// with U_hat = (m - 1) / sum_r min(hmin_a[r], hmin_b[r]).
MinHashEstimate MinHashInnerProduct(const MinHashSketch& sa,
                                    const MinHashSketch& sb);

inline double StorageWords(const MinHashSketch& s) {
  return 1.5 * static_cast<double>(s.m);
}

}  // namespace ipsketch

#endif  // IPSKETCH_BASELINES_H_
