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

#include "ipsketch/baselines.h"

#include <cmath>
#include <limits>
#include <string>

#include "ipsketch/error.h"
#include "ipsketch/hashing.h"

namespace ipsketch {

namespace {

constexpr std::uint64_t kJlSalt = 0x4a4c2d7369676e73ULL;
constexpr std::uint64_t kBucketSalt = 0x63736275636b6574ULL;
constexpr std::uint64_t kSignSalt = 0x637373696e67736eULL;
constexpr std::uint64_t kMinHashSalt = 0x6d696e6861736821ULL;

// Uniform integer in [0, range) from 64 random bits.
std::uint64_t Reduce(std::uint64_t bits, std::uint64_t range) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(bits) * range) >> 64);
}

}  // namespace

std::string_view LinearKindTag(LinearKind kind) {
  return kind == LinearKind::kJl ? "jl" : "countsketch";
}

LinearSketch JlSketch(const SparseVector& a, std::uint64_t seed,
                      std::uint64_t m) {
  if (m == 0) throw ContractError("JlSketch: m must be >= 1");
  LinearSketch s{LinearKind::kJl, m, seed, a.universe_size(),
                 std::vector<double>(m, 0.0)};
  const std::uint64_t row_seed = HashCombine(seed, kJlSalt);
  // 64 row signs per hash evaluation: bit k of block b is sigma(64 b + k, i).
  for (const Entry& e : a.entries()) {
    const std::uint64_t column = HashCombine(row_seed, e.index);
    for (std::uint64_t block = 0; block * 64 < m; ++block) {
      std::uint64_t bits = HashCombine(column, block);
      const std::uint64_t rows = std::min<std::uint64_t>(64, m - block * 64);
      double* out = s.coords.data() + block * 64;
      for (std::uint64_t k = 0; k < rows; ++k) {
        out[k] += (bits & 1) ? e.value : -e.value;
        bits >>= 1;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (double& c : s.coords) c *= scale;
  return s;
}

LinearSketch CountSketch(const SparseVector& a, std::uint64_t seed,
                         std::uint64_t m) {
  if (m == 0) throw ContractError("CountSketch: m must be >= 1");
  LinearSketch s{LinearKind::kCountSketch, m, seed, a.universe_size(),
                 std::vector<double>(m, 0.0)};
  const std::uint64_t bucket_seed = HashCombine(seed, kBucketSalt);
  const std::uint64_t sign_seed = HashCombine(seed, kSignSalt);
  for (const Entry& e : a.entries()) {
    const std::uint64_t bucket = Reduce(HashCombine(bucket_seed, e.index), m);
    const bool positive = (HashCombine(sign_seed, e.index) >> 63) != 0;
    s.coords[bucket] += positive ? e.value : -e.value;
  }
  return s;
}

LinearSketch MakeLinearSketch(LinearKind kind, const SparseVector& a,
                              std::uint64_t seed, std::uint64_t m) {
  return kind == LinearKind::kJl ? JlSketch(a, seed, m) : CountSketch(a, seed, m);
}

double LinearEstimate(const LinearSketch& sa, const LinearSketch& sb) {
  if (sa.kind != sb.kind || sa.m != sb.m || sa.seed != sb.seed ||
      sa.coords.size() != sb.coords.size()) {
    throw ContractError("linear sketches differ in kind, size or seed");
  }
  if (sa.universe_size != sb.universe_size) {
    throw DimensionError("linear sketches cover different universes");
  }
  double dot = 0.0;
  for (std::size_t r = 0; r < sa.coords.size(); ++r) {
    dot += sa.coords[r] * sb.coords[r];
  }
  return dot;
}

MinHashSketch MinHash(const SparseVector& a, std::uint64_t seed,
                      std::uint64_t m) {
  if (m == 0) throw ContractError("MinHash: m must be >= 1");
  MinHashSketch s{m, seed, a.universe_size(), std::vector<double>(m, 1.0),
                  std::vector<Index>(m, std::numeric_limits<Index>::max()),
                  std::vector<double>(m, 0.0)};
  const std::uint64_t base = HashCombine(seed, kMinHashSalt);
  for (std::uint64_t r = 0; r < m; ++r) {
    const UniformHasher h(HashCombine(base, r));
    for (const Entry& e : a.entries()) {
      const double x = h(e.index);
      if (x < s.min_hash[r]) {
        s.min_hash[r] = x;
        s.min_index[r] = e.index;
        s.min_value[r] = e.value;
      }
    }
  }
  return s;
}

MinHashEstimate MinHashInnerProduct(const MinHashSketch& sa,
                                    const MinHashSketch& sb) {
  if (sa.m != sb.m || sa.seed != sb.seed) {
    throw ContractError("MinHash sketches differ in size or seed");
  }
  if (sa.universe_size != sb.universe_size) {
    throw DimensionError("MinHash sketches cover different universes");
  }
  MinHashEstimate out;
  double min_sum = 0.0;
  double matched_sum = 0.0;
  for (std::uint64_t r = 0; r < sa.m; ++r) {
    min_sum += std::min(sa.min_hash[r], sb.min_hash[r]);
    if (sa.min_index[r] == sb.min_index[r] &&
        sa.min_index[r] != std::numeric_limits<Index>::max()) {
      ++out.matched;
      matched_sum += sa.min_value[r] * sb.min_value[r];
    }
  }
  const double m = static_cast<double>(sa.m);
  out.union_size = std::max(m - 1.0, 1.0) / std::max(min_sum, kUnitResolution);
  out.estimate = out.union_size / m * matched_sum;
  return out;
}

}  // namespace ipsketch
