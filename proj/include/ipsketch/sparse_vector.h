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

#ifndef IPSKETCH_SPARSE_VECTOR_H_
#define IPSKETCH_SPARSE_VECTOR_H_

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ipsketch {

using Index = std::uint64_t;

struct Entry {
  Index index = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Immutable sparse vector over the universe {0, ..., universe_size - 1}.
// Entries are kept sorted by index; zeros are never stored.
class SparseVector {
 public:
  SparseVector() = default;

  // Entries may be given in any order. Throws ContractError on a duplicate
  // index, an explicit zero, a non-finite value, or an index outside the
  // universe.
  SparseVector(Index universe_size, std::vector<Entry> entries);

  // Keeps the nonzero coordinates of a dense array.
  static SparseVector FromDense(std::span<const double> dense);

  Index universe_size() const { return universe_size_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const Entry> entries() const { return entries_; }

  // Value at `index`, 0 when absent. O(log nnz).
  double value(Index index) const;
  bool contains(Index index) const;

  std::vector<double> ToDense() const;

  // Entrywise transform of the stored values (support is preserved, so `fn`
  // must not map a nonzero to zero).
  template <class Fn>
  SparseVector Map(Fn&& fn) const {
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (const Entry& e : entries_) out.push_back({e.index, fn(e.value)});
    return SparseVector(universe_size_, std::move(out), kSortedTag);
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  struct SortedTag {};
  static constexpr SortedTag kSortedTag{};
  SparseVector(Index universe_size, std::vector<Entry> entries, SortedTag);

  Index universe_size_ = 1;
  std::vector<Entry> entries_;
};

struct Norms {
  double l1 = 0.0;
  double l2_squared = 0.0;
};

// The vectors a, a^2 (entrywise) and the support indicator 1_a.
struct DerivedTriple {
  SparseVector base;
  SparseVector squared;
  SparseVector indicator;
};

// Exact <a, b> by sorted merge; summation in ascending index order.
double ExactInnerProduct(const SparseVector& a, const SparseVector& b);

Norms ComputeNorms(const SparseVector& a);

// ||a_I||_2^2 where I = supp(a) ∩ supp(b).
double RestrictedL2Squared(const SparseVector& a, const SparseVector& b);

// |supp(a) ∩ supp(b)|.
std::size_t OverlapSize(const SparseVector& a, const SparseVector& b);

DerivedTriple DeriveTriple(const SparseVector& a);

// Stable 64-bit hash of a textual key (FNV-1a followed by a 64-bit
// finalizer). Identical on every platform.
std::uint64_t StableKeyHash(std::string_view key);

// Reads `key,value` rows (an optional non-numeric header line is skipped).
// Keys are mapped to StableKeyHash(key) % universe_size; repeated keys, and
// keys that collide after reduction, are summed. Entries that sum to exactly
// zero are dropped.
SparseVector IngestKeyValueCsv(std::istream& in,
                               Index universe_size = UINT64_MAX);

// Frequency vector of a multiset of keys: entry = multiplicity.
SparseVector KeyFrequencyVector(std::span<const std::string> keys,
                                Index universe_size = UINT64_MAX);

}  // namespace ipsketch

#endif  // IPSKETCH_SPARSE_VECTOR_H_
