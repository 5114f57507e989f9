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

#ifndef IPSKETCH_TESTS_FIXTURES_H_
#define IPSKETCH_TESTS_FIXTURES_H_

#include <cstdint>
#include <vector>

#include "ipsketch/hashing.h"
#include "ipsketch/harness.h"
#include "ipsketch/sparse_vector.h"

namespace ipsketch::testing {

// Worked example: 16 positions (1-based labels kept as indices).
inline SparseVector ExampleA() {
  return SparseVector(17, {{3, 2.5}, {6, 2.3}, {8, 4}, {11, 0.5}, {13, 3}, {16, -3.7}});
}

inline SparseVector ExampleB() {
  return SparseVector(
      17, {{3, -3.1}, {7, 0.4}, {8, -4.2}, {10, 1.5}, {11, 1}, {13, -2.6}, {14, -5.9}});
}

// Fixed hash column of the worked example.
inline double ExampleHash(Index i) {
  switch (i) {
    case 3: return 0.11;
    case 6: return 0.39;
    case 7: return 0.92;
    case 8: return 0.14;
    case 10: return 0.42;
    case 11: return 0.8;
    case 13: return 0.43;
    case 14: return 0.07;
    case 16: return 0.23;
    default: return 0.5;
  }
}

inline std::vector<double> ExampleHashes(const SparseVector& v) {
  std::vector<double> h;
  for (const Entry& e : v.entries()) h.push_back(ExampleHash(e.index));
  return h;
}

// Random vector with `nnz` nonzeros, values uniform in [-1, 1] with a few
// larger entries.
inline SparseVector RandomVector(std::uint64_t seed, Index n, std::uint64_t nnz) {
  Rng rng(seed);
  std::vector<Entry> e;
  for (std::uint64_t i : SampleWithoutReplacement(rng, n, nnz)) {
    double v = 0.0;
    while (v == 0.0) v = rng.Uniform(-1.0, 1.0);
    if (rng.Unit() < 0.1) v *= 5.0;
    e.push_back({i, v});
  }
  return SparseVector(n, std::move(e));
}

inline std::pair<SparseVector, SparseVector> RandomPair(std::uint64_t seed, Index n,
                                                        std::uint64_t nnz,
                                                        double overlap,
                                                        double outliers = 0.05) {
  SyntheticSpec spec;
  spec.universe_size = n;
  spec.nnz = nnz;
  spec.overlap_fraction = overlap;
  spec.outlier_fraction = outliers;
  spec.seed = seed;
  return GenPair(spec);
}

}  // namespace ipsketch::testing

#endif  // IPSKETCH_TESTS_FIXTURES_H_
