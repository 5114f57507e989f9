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
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "ipsketch/estimator.h"
#include "ipsketch/hashing.h"
#include "ipsketch/harness.h"
#include "ipsketch/priority_sketch.h"

namespace ipsketch {
namespace {

using testing::ExampleA;
using testing::ExampleB;
using testing::ExampleHashes;

TEST_CASE("rank selection basics") {
  const std::vector<double> few = {0.3, 0.1, 0.2};
  RankSelection s = SelectSmallestRanks(few, 5);
  CHECK(s.kept == std::vector<std::size_t>{0, 1, 2});
  CHECK(std::isinf(s.tau));

  const std::vector<double> ranks = {5, 1, 3, 2, 4};
  s = SelectSmallestRanks(ranks, 2);
  CHECK(s.kept == std::vector<std::size_t>{1, 3});
  CHECK(s.tau == 3.0);
}

TEST_CASE("rank selection ties go to the smaller position") {
  const std::vector<double> ranks = {2, 1, 2, 2, 0.5};
  const RankSelection s = SelectSmallestRanks(ranks, 3);
  CHECK(s.kept == std::vector<std::size_t>{0, 1, 4});
  CHECK(s.tau == 2.0);
}

TEST_CASE("rank selection agrees with a full sort") {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> ranks(1000);
    for (double& r : ranks) r = rng.Unit();
    for (std::uint64_t m : {1, 10, 500, 999}) {
      std::vector<std::size_t> order(ranks.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(),
                [&](std::size_t x, std::size_t y) { return ranks[x] < ranks[y]; });
      std::vector<std::size_t> expect(order.begin(), order.begin() + m);
      std::sort(expect.begin(), expect.end());
      const RankSelection s = SelectSmallestRanks(ranks, m);
      CHECK(s.kept == expect);
      CHECK(s.tau == ranks[order[m]]);
    }
  }
}

TEST_CASE("worked example with fixed hashes") {
  const SparseVector a = ExampleA();
  const SampleSketch s = PrioritySketchWithHashes(a, ExampleHashes(a), 0, 4);
  // Ranks: 8 -> .00875, 16 -> .0168, 3 -> .0176, 13 -> .0478, 6 -> .0737.
  CHECK(s.keys == std::vector<Index>{3, 8, 13, 16});
  CHECK(s.tau == doctest::Approx(0.39 / 5.29).epsilon(1e-12));
  CHECK(s.tau == doctest::Approx(0.0737).epsilon(1e-3));
}

TEST_CASE("small vectors are kept whole and estimated exactly") {
  const SparseVector a = ExampleA();
  const SparseVector b = ExampleB();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SampleSketch sa = PrioritySketch(a, seed, 7);
    const SampleSketch sb = PrioritySketch(b, seed, 7);
    CHECK(sa.size() == 6);
    CHECK(std::isinf(sa.tau));
    CHECK(EstimateInnerProduct(sa, sb).estimate ==
          doctest::Approx(-31.85).epsilon(1e-12));
  }
  const SampleSketch e = PrioritySketch(SparseVector(5, {}), 1, 3);
  CHECK(e.size() == 0);
  CHECK(std::isinf(e.tau));
}

TEST_CASE("exact size and strict threshold on every draw") {
  const SparseVector a = testing::RandomVector(21, 5000, 700);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    for (std::uint64_t m : {1, 50, 699, 700, 900}) {
      const SampleSketch s = PrioritySketch(a, seed, m);
      CHECK(s.size() == std::min<std::uint64_t>(m, a.nnz()));
      const UniformHasher h(seed);
      for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK(h(s.keys[j]) / (s.values[j] * s.values[j]) < s.tau);
      }
    }
  }
}

TEST_CASE("unbiased on a small pair") {
  const SparseVector a(12, {{0, 1.5}, {2, -0.4}, {3, 2}, {5, 0.7}, {7, -1.1}, {8, 3}, {10, 0.2}, {11, -0.9}});
  const SparseVector b(12, {{1, 0.8}, {2, 1.3}, {3, -0.6}, {5, 2.2}, {6, 1}, {8, -1.7}, {9, 0.5}, {11, 0.3}});
  const Moments mc = MonteCarloMoments(a, b, 6, 100000, Method::kPriorityL2, 31);
  CHECK(std::abs(mc.mean - ExactInnerProduct(a, b)) <= 3 * mc.standard_error);
}

TEST_CASE("estimator terms of distinct indices are uncorrelated") {
  // Magnitudes in [0.5, 1.5]: heavy-tailed terms make the sample covariance
  // test badly calibrated.
  std::vector<Entry> ea, eb;
  Rng rng(40);
  for (Index i = 0; i < 30; ++i) {
    ea.push_back({i, (rng.Unit() < 0.5 ? -1 : 1) * rng.Uniform(0.5, 1.5)});
    eb.push_back({i, (rng.Unit() < 0.5 ? -1 : 1) * rng.Uniform(0.5, 1.5)});
  }
  const SparseVector a(30, ea), b(30, eb);
  const std::vector<Index> probe = {a.entries()[0].index, a.entries()[7].index,
                                    a.entries()[19].index};
  const std::uint64_t trials = 100000;
  std::vector<std::vector<double>> w(probe.size(), std::vector<double>(trials, 0.0));
  for (std::uint64_t t = 0; t < trials; ++t) {
    const SampleSketch sa = PrioritySketch(a, DeriveSeed(9, t), 8);
    const SampleSketch sb = PrioritySketch(b, DeriveSeed(9, t), 8);
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
      if (sa.keys[i] < sb.keys[j]) {
        ++i;
      } else if (sb.keys[j] < sa.keys[i]) {
        ++j;
      } else {
        const double p = std::min({1.0, sa.InclusionProbability(i), sb.InclusionProbability(j)});
        for (std::size_t k = 0; k < probe.size(); ++k) {
          if (probe[k] == sa.keys[i]) w[k][t] = sa.values[i] * sb.values[j] / p;
        }
        ++i;
        ++j;
      }
    }
  }
  for (std::size_t x = 0; x < probe.size(); ++x) {
    for (std::size_t y = x + 1; y < probe.size(); ++y) {
      const double mx = std::accumulate(w[x].begin(), w[x].end(), 0.0) / trials;
      const double my = std::accumulate(w[y].begin(), w[y].end(), 0.0) / trials;
      double cov = 0.0, cov2 = 0.0;
      for (std::uint64_t t = 0; t < trials; ++t) {
        const double z = (w[x][t] - mx) * (w[y][t] - my);
        cov += z;
        cov2 += z * z;
      }
      cov /= trials;
      const double se = std::sqrt((cov2 / trials - cov * cov) / trials);
      // Three pairs at overall alpha = 0.01.
      CHECK(std::abs(cov) <= 2.94 * se);
    }
  }
}

}  // namespace
}  // namespace ipsketch
