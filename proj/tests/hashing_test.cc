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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "ipsketch/hashing.h"

namespace ipsketch {
namespace {

TEST_CASE("hash is deterministic and in [0, 1)") {
  const UniformHasher h(42);
  CHECK(h(7) == h(7));
  CHECK(UniformHasher(42)(7) == h(7));
  for (Index i = 0; i < 10000; ++i) {
    const double x = h(i);
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("different seeds give different hashes") {
  int equal = 0;
  for (Index i = 0; i < 1000; ++i) {
    if (UniformHasher(1)(i) == UniformHasher(2)(i)) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("Kolmogorov-Smirnov against the uniform distribution") {
  const UniformHasher h(0xfeedULL);
  const std::size_t n = 1000000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = h(i);
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, x[i] - lo, hi - x[i]});
  }
  // Critical value at alpha = 0.01: 1.628 / sqrt(n).
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("hashes of distinct indices are uncorrelated") {
  const UniformHasher h(99);
  Rng rng(5);
  const int pairs = 200000;
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (int k = 0; k < pairs; ++k) {
    const Index i = rng.Bits();
    Index j = rng.Bits();
    if (j == i) ++j;
    const double x = h(i), y = h(j);
    sx += x; sy += y; sxy += x * y; sxx += x * x; syy += y * y;
  }
  const double n = pairs;
  const double r = (n * sxy - sx * sy) /
                   std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  // |r| beyond 3.3 / sqrt(n) has probability < 0.001 under independence.
  CHECK(std::abs(r) < 3.3 / std::sqrt(n));
}

TEST_CASE("adjacent indices are uncorrelated") {
  const UniformHasher h(3);
  const int n = 200000;
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    const double x = h(i), y = h(i + 1);
    sx += x; sy += y; sxy += x * y; sxx += x * x; syy += y * y;
  }
  const double r = (n * sxy - sx * sy) /
                   std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(std::abs(r) < 3.3 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sketches of different vectors see the same hash") {
  const SparseVector a = testing::ExampleA();
  const SparseVector b = testing::ExampleB();
  const UniformHasher h(11);
  const auto ha = HashSupport(a, h);
  const auto hb = HashSupport(b, h);
  for (std::size_t i = 0; i < a.nnz(); ++i) {
    for (std::size_t j = 0; j < b.nnz(); ++j) {
      if (a.entries()[i].index == b.entries()[j].index) CHECK(ha[i] == hb[j]);
    }
  }
}

TEST_CASE("derived trial seeds are distinct") {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t t = 0; t < 1000; ++t) seeds.push_back(DeriveSeed(7, t));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  CHECK(DeriveSeed(7, 3) != DeriveSeed(8, 3));
}

}  // namespace
}  // namespace ipsketch
