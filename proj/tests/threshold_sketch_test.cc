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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "ipsketch/error.h"
#include "ipsketch/hashing.h"
#include "ipsketch/threshold_sketch.h"

namespace ipsketch {
namespace {

using testing::ExampleA;
using testing::ExampleB;
using testing::ExampleHashes;

double BisectMPrime(const std::vector<double>& q, double m) {
  double lo = 0.0, hi = 1.0;
  while (ExpectedSampleCount(q, hi) < m) hi *= 2;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (ExpectedSampleCount(q, mid) < m ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> L2Weights(const SparseVector& a) {
  const double total = ComputeNorms(a).l2_squared;
  std::vector<double> q;
  for (const Entry& e : a.entries()) q.push_back(e.value * e.value / total);
  return q;
}

TEST_CASE("worked example with fixed hashes") {
  const SparseVector a = ExampleA();
  const SparseVector b = ExampleB();
  const SampleSketch sa = ThresholdSketchWithHashes(a, ExampleHashes(a), 0, 4, false);
  const SampleSketch sb = ThresholdSketchWithHashes(b, ExampleHashes(b), 0, 4, false);
  CHECK(sa.tau == doctest::Approx(4 / 50.48).epsilon(1e-12));
  CHECK(sb.tau == doctest::Approx(4 / 72.23).epsilon(1e-12));
  CHECK(sa.tau == doctest::Approx(0.079).epsilon(0.01));
  CHECK(sb.tau == doctest::Approx(0.055).epsilon(0.01));
  // h(6) = 0.39 <= 4 * 5.29 / 50.48 = 0.419, so index 6 passes the test too.
  CHECK(sa.keys == std::vector<Index>{3, 6, 8, 13, 16});
  CHECK(sa.values == std::vector<double>{2.5, 2.3, 4, 3, -3.7});
  CHECK(sb.keys == std::vector<Index>{3, 8, 14});
  CHECK(sa.m_prime == 4.0);
}

TEST_CASE("adaptive threshold: equal magnitudes need no adjustment") {
  const SparseVector a(10, {{0, 2}, {3, -2}, {4, 2}, {7, 2}, {9, -2}});
  for (std::uint64_t m = 1; m <= 5; ++m) {
    const AdaptiveSolution s = AdaptiveMPrime(a, m);
    CHECK(s.m_prime == doctest::Approx(static_cast<double>(m)).epsilon(1e-12));
    CHECK_FALSE(s.clamped);
  }
}

TEST_CASE("adaptive threshold: one dominant entry") {
  const SparseVector a(5, {{0, 10}, {1, 1}, {2, 1}, {3, 1}, {4, 1}});
  const AdaptiveSolution s = AdaptiveMPrime(a, 2);
  CHECK(s.m_prime == doctest::Approx(26.0).epsilon(1e-12));
  CHECK(ExpectedSampleCount(L2Weights(a), s.m_prime) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.iterations <= 2);
}

TEST_CASE("adaptive threshold of the worked example matches bisection") {
  const SparseVector a = ExampleA();
  const AdaptiveSolution s = AdaptiveMPrime(a, 4);
  // Frozen bisection result for this vector.
  CHECK(s.m_prime == doctest::Approx(4.856180856180855).epsilon(1e-12));
  CHECK(s.m_prime == doctest::Approx(BisectMPrime(L2Weights(a), 4)).epsilon(1e-12));
  CHECK(std::abs(ExpectedSampleCount(L2Weights(a), s.m_prime) - 4.0) <= 1e-9 * 4);
}

TEST_CASE("adaptive threshold on random vectors") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const SparseVector a = testing::RandomVector(seed, 500, 120);
    for (std::uint64_t m : {1, 5, 17, 60, 119}) {
      const AdaptiveSolution s = AdaptiveMPrime(a, m);
      const auto q = L2Weights(a);
      CHECK(s.m_prime >= static_cast<double>(m) * (1 - 1e-12));
      CHECK(std::abs(ExpectedSampleCount(q, s.m_prime) - m) <= 1e-9 * m);
      CHECK(s.iterations <= static_cast<int>(m) + 1);
      CHECK(s.m_prime == doctest::Approx(BisectMPrime(q, m)).epsilon(1e-9));
    }
  }
}

TEST_CASE("adaptive threshold clamps m above nnz") {
  const SparseVector a = ExampleA();
  const AdaptiveSolution s = AdaptiveMPrime(a, 10);
  CHECK(s.clamped);
  CHECK(s.target == 6.0);
  CHECK(std::isfinite(s.m_prime));
  CHECK(ExpectedSampleCount(L2Weights(a), s.m_prime) == doctest::Approx(6.0));
}

TEST_CASE("m >= nnz keeps every entry") {
  const SparseVector a = ExampleA();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SampleSketch s = ThresholdSketch(a, seed, 6);
    CHECK(s.size() == 6);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(s.InclusionProbability(j) == 1.0);
  }
}

TEST_CASE("empty vector gives an empty sketch") {
  const SampleSketch s = ThresholdSketch(SparseVector(9, {}), 1, 4);
  CHECK(s.size() == 0);
  CHECK(s.tau == 4.0);
  CHECK_THROWS_AS(ThresholdSketch(ExampleA(), 1, 0), ContractError);
}

TEST_CASE("inclusion rule and determinism") {
  const SparseVector a = testing::RandomVector(3, 1000, 300);
  const SampleSketch s = ThresholdSketch(a, 77, 40);
  CHECK(s == ThresholdSketch(a, 77, 40));
  const UniformHasher h(77);
  std::size_t j = 0;
  for (const Entry& e : a.entries()) {
    const bool in = h(e.index) <= e.value * e.value * s.tau;
    const bool kept = j < s.size() && s.keys[j] == e.index;
    CHECK(in == kept);
    if (kept) {
      CHECK(s.values[j] == e.value);
      ++j;
    }
  }
  CHECK(j == s.size());
}

TEST_CASE("adaptive expected size is m") {
  const SparseVector a = testing::RandomVector(9, 200, 50);
  const std::uint64_t trials = 100000;
  double sum = 0, sum2 = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double k = static_cast<double>(ThresholdSketch(a, DeriveSeed(1, t), 8).size());
    sum += k;
    sum2 += k * k;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
  CHECK(std::abs(mean - 8.0) <= 3 * se);
}

TEST_CASE("non-adaptive expected size is at most m") {
  const SparseVector a = testing::RandomVector(10, 200, 50);
  const std::uint64_t trials = 20000;
  double sum = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    sum += static_cast<double>(ThresholdSketch(a, DeriveSeed(2, t), 8, false).size());
  }
  CHECK(sum / trials <= 8.0 + 0.05);
}

TEST_CASE("size tail bound") {
  const SparseVector big = testing::RandomVector(4, 20000, 2000);
  CHECK(SketchSizeTailFrequency(big, 100, 0.01, 10000, 5) <= 0.01);
  CHECK(SketchSizeTailFrequency(testing::RandomVector(5, 400, 100), 16, 0.25, 10000, 6) <= 0.25);
  CHECK(SketchSizeTailFrequency(ExampleA(), 6, 0.01, 1000, 7) == 0.0);
}

TEST_CASE("coordination nests samples") {
  // Whenever q_a(i) <= q_b(i) under the same m', i in K_a implies i in K_b.
  const auto [a, b] = testing::RandomPair(8, 400, 120, 0.5);
  const auto qa = L2Weights(a);
  const auto qb = L2Weights(b);
  int checked = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    const SampleSketch sa = ThresholdSketch(a, t, 30, false);
    const SampleSketch sb = ThresholdSketch(b, t, 30, false);
    for (std::size_t j = 0; j < sa.size(); ++j) {
      const Index i = sa.keys[j];
      if (!b.contains(i)) continue;
      const double wa = sa.values[j] * sa.values[j] * sa.tau;
      const double wb = b.value(i) * b.value(i) * sb.tau;
      if (wa <= wb) {
        CHECK(std::binary_search(sb.keys.begin(), sb.keys.end(), i));
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("raising m' never removes an index") {
  const SparseVector a = testing::RandomVector(12, 1000, 200);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SampleSketch small = ThresholdSketch(a, seed, 10, false);
    const SampleSketch large = ThresholdSketch(a, seed, 25, false);
    CHECK(std::includes(large.keys.begin(), large.keys.end(), small.keys.begin(),
                        small.keys.end()));
  }
}

}  // namespace
}  // namespace ipsketch
