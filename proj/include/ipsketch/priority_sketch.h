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

#ifndef IPSKETCH_PRIORITY_SKETCH_H_
#define IPSKETCH_PRIORITY_SKETCH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ipsketch/sample_sketch.h"
#include "ipsketch/sparse_vector.h"

namespace ipsketch {

struct RankSelection {
  std::vector<std::size_t> kept;  // positions into `ranks`, ascending
  double tau = kInfinity;         // (m+1)-st smallest rank
};

// Keeps the m smallest ranks by selection (expected O(N), independent of
// m). Equal ranks are ordered by position, smaller first. When
// there are at most m ranks all are kept and tau is +infinity.
RankSelection SelectSmallestRanks(std::span<const double> ranks,
                                  std::uint64_t m);

// Priority (sequential Poisson) sampling: rank R_i = h(i) / w_i, keep the
// m smallest, store the (m+1)-st as tau. |K_a| == min(m, nnz(a)) always.
SampleSketch PrioritySketch(const SparseVector& a, std::uint64_t seed,
                            std::uint64_t m,
                            Probability probability = Probability::kL2);

SampleSketch PrioritySketchWithHashes(const SparseVector& a,
                                      std::span<const double> hashes,
                                      std::uint64_t seed, std::uint64_t m,
                                      Probability probability = Probability::kL2);

}  // namespace ipsketch

#endif  // IPSKETCH_PRIORITY_SKETCH_H_
