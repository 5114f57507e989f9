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

#include "ipsketch/sparse_vector.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "ipsketch/error.h"
#include "ipsketch/hashing.h"

namespace ipsketch {

SparseVector::SparseVector(Index universe_size, std::vector<Entry> entries)
    : universe_size_(universe_size), entries_(std::move(entries)) {
  if (universe_size_ == 0) {
    throw ContractError("SparseVector: universe_size must be positive");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& x, const Entry& y) { return x.index < y.index; });
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    const Entry& e = entries_[j];
    if (e.index >= universe_size_) {
      throw ContractError("SparseVector: index " + std::to_string(e.index) +
                          " outside universe of size " +
                          std::to_string(universe_size_));
    }
    if (e.value == 0.0) {
      throw ContractError("SparseVector: explicit zero at index " +
                          std::to_string(e.index));
    }
    if (!std::isfinite(e.value)) {
      throw ContractError("SparseVector: non-finite value at index " +
                          std::to_string(e.index));
    }
    if (j > 0 && entries_[j - 1].index == e.index) {
      throw ContractError("SparseVector: duplicate index " +
                          std::to_string(e.index));
    }
  }
}

SparseVector::SparseVector(Index universe_size, std::vector<Entry> entries,
                           SortedTag)
    : universe_size_(universe_size), entries_(std::move(entries)) {}

SparseVector SparseVector::FromDense(std::span<const double> dense) {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) out.push_back({i, dense[i]});
  }
  return SparseVector(std::max<Index>(dense.size(), 1), std::move(out));
}

double SparseVector::value(Index index) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const Entry& e, Index i) { return e.index < i; });
  return (it != entries_.end() && it->index == index) ? it->value : 0.0;
}

bool SparseVector::contains(Index index) const { return value(index) != 0.0; }

std::vector<double> SparseVector::ToDense() const {
  std::vector<double> out(universe_size_, 0.0);
  for (const Entry& e : entries_) out[e.index] = e.value;
  return out;
}

namespace {

void CheckSameUniverse(const SparseVector& a, const SparseVector& b) {
  if (a.universe_size() != b.universe_size()) {
    throw DimensionError("universe sizes differ: " +
                         std::to_string(a.universe_size()) + " vs " +
                         std::to_string(b.universe_size()));
  }
}

// Calls fn(a_i, b_i) for each shared index in ascending order.
template <class Fn>
void ForEachShared(const SparseVector& a, const SparseVector& b, Fn&& fn) {
  auto ea = a.entries();
  auto eb = b.entries();
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].index < eb[j].index) {
      ++i;
    } else if (eb[j].index < ea[i].index) {
      ++j;
    } else {
      fn(ea[i].value, eb[j].value);
      ++i;
      ++j;
    }
  }
}

}  // namespace

double ExactInnerProduct(const SparseVector& a, const SparseVector& b) {
  CheckSameUniverse(a, b);
  double sum = 0.0;
  ForEachShared(a, b, [&](double x, double y) { sum += x * y; });
  return sum;
}

Norms ComputeNorms(const SparseVector& a) {
  Norms n;
  for (const Entry& e : a.entries()) {
    n.l1 += std::abs(e.value);
    n.l2_squared += e.value * e.value;
  }
  return n;
}

double RestrictedL2Squared(const SparseVector& a, const SparseVector& b) {
  CheckSameUniverse(a, b);
  double sum = 0.0;
  ForEachShared(a, b, [&](double x, double) { sum += x * x; });
  return sum;
}

std::size_t OverlapSize(const SparseVector& a, const SparseVector& b) {
  CheckSameUniverse(a, b);
  std::size_t count = 0;
  ForEachShared(a, b, [&](double, double) { ++count; });
  return count;
}

DerivedTriple DeriveTriple(const SparseVector& a) {
  return {a, a.Map([](double v) { return v * v; }),
          a.Map([](double) { return 1.0; })};
}

std::uint64_t StableKeyHash(std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix64(h);
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

SparseVector FromAggregate(const std::map<Index, double>& agg,
                           Index universe_size) {
  std::vector<Entry> entries;
  entries.reserve(agg.size());
  for (const auto& [index, value] : agg) {
    if (value != 0.0) entries.push_back({index, value});
  }
  return SparseVector(universe_size, std::move(entries));
}

}  // namespace

SparseVector IngestKeyValueCsv(std::istream& in, Index universe_size) {
  if (universe_size == 0) throw ContractError("universe_size must be positive");
  std::map<Index, double> agg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = Trim(line);
    if (row.empty()) continue;
    auto comma = row.find(',');
    if (comma == std::string_view::npos) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": expected key,value");
    }
    std::string_view key = Trim(row.substr(0, comma));
    std::string_view text = Trim(row.substr(comma + 1));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      if (line_no == 1) continue;  // header
      throw FormatError("line " + std::to_string(line_no) +
                        ": value is not a number: " + std::string(text));
    }
    if (!std::isfinite(value)) {
      throw FormatError("line " + std::to_string(line_no) + ": non-finite value");
    }
    agg[StableKeyHash(key) % universe_size] += value;
  }
  return FromAggregate(agg, universe_size);
}

SparseVector KeyFrequencyVector(std::span<const std::string> keys,
                                Index universe_size) {
  if (universe_size == 0) throw ContractError("universe_size must be positive");
  std::map<Index, double> agg;
  for (const std::string& k : keys) agg[StableKeyHash(k) % universe_size] += 1.0;
  return FromAggregate(agg, universe_size);
}

}  // namespace ipsketch
