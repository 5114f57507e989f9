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

#include "ipsketch/priority_sketch.h"

#include <algorithm>
#include <utility>

#include "ipsketch/error.h"
#include "ipsketch/hashing.h"

namespace ipsketch {

RankSelection SelectSmallestRanks(std::span<const double> ranks,
                                  std::uint64_t m) {
  RankSelection out;
  if (ranks.size() <= m) {
    out.kept.resize(ranks.size());
    for (std::size_t j = 0; j < ranks.size(); ++j) out.kept[j] = j;
    return out;
  }
  // Order by (rank, position): the tie rule.
  auto before = [&](std::size_t x, std::size_t y) {
    return ranks[x] < ranks[y] || (ranks[x] == ranks[y] && x < y);
  };
  std::vector<std::size_t> order(ranks.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  const auto cut = order.begin() + static_cast<std::ptrdiff_t>(m);
  std::nth_element(order.begin(), cut, order.end(), before);
  out.tau = ranks[*cut];
  // Marking then scanning keeps the output ascending without an m log m sort.
  std::vector<char> keep(ranks.size(), 0);
  for (auto it = order.begin(); it != cut; ++it) keep[*it] = 1;
  out.kept.reserve(m);
  for (std::size_t j = 0; j < keep.size(); ++j) {
    if (keep[j]) out.kept.push_back(j);
  }
  return out;
}

SampleSketch PrioritySketchWithHashes(const SparseVector& a,
                                      std::span<const double> hashes,
                                      std::uint64_t seed, std::uint64_t m,
                                      Probability probability) {
  if (m == 0) throw ContractError("PrioritySketch: m must be >= 1");
  if (hashes.size() != a.nnz()) {
    throw ContractError("PrioritySketch: one hash value per nonzero required");
  }
  SampleSketch s;
  s.method = MakeMethod(Family::kPriority, probability);
  s.m = m;
  s.seed = seed;
  s.universe_size = a.universe_size();
  s.m_prime = static_cast<double>(m);
  if (probability == Probability::kL1) s.aux = ComputeNorms(a).l1;
  if (probability == Probability::kUniform) s.aux = static_cast<double>(a.nnz());

  const auto entries = a.entries();
  std::vector<double> ranks(entries.size());
  for (std::size_t j = 0; j < entries.size(); ++j) {
    ranks[j] = hashes[j] / SamplingWeight(probability, entries[j].value);
  }
  const RankSelection sel = SelectSmallestRanks(ranks, m);
  s.tau = sel.tau;
  s.keys.reserve(sel.kept.size());
  s.values.reserve(sel.kept.size());
  for (std::size_t j : sel.kept) {
    s.keys.push_back(entries[j].index);
    s.values.push_back(entries[j].value);
  }
  return s;
}

SampleSketch PrioritySketch(const SparseVector& a, std::uint64_t seed,
                            std::uint64_t m, Probability probability) {
  const auto hashes = HashSupport(a, UniformHasher(seed));
  return PrioritySketchWithHashes(a, hashes, seed, m, probability);
}

}  // namespace ipsketch
