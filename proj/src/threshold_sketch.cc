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

#include "ipsketch/threshold_sketch.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "ipsketch/error.h"
#include "ipsketch/hashing.h"

namespace ipsketch {

double ExpectedSampleCount(std::span<const double> q, double m_prime) {
  double sum = 0.0;
  for (double x : q) sum += std::min(1.0, m_prime * x);
  return sum;
}

AdaptiveSolution SolveSaturatingBudget(std::span<const double> q, double m,
                                       double start) {
  if (m <= 0) throw ContractError("SolveSaturatingBudget: m must be positive");
  std::vector<double> sorted;
  sorted.reserve(q.size());
  for (double x : q) {
    if (x < 0 || !std::isfinite(x)) {
      throw ContractError("SolveSaturatingBudget: weights must be finite and >= 0");
    }
    if (x > 0) sorted.push_back(x);
  }
  if (sorted.empty()) {
    throw ContractError("SolveSaturatingBudget: no positive weight");
  }
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto n = static_cast<double>(sorted.size());

  AdaptiveSolution sol;
  sol.target = std::min(m, n);
  sol.clamped = m > n;
  if (m >= n) {
    sol.m_prime = 1.0 / sorted.back();
    return sol;
  }

  // suffix[k] = sum of sorted[k..]; ascending accumulation for accuracy.
  std::vector<double> suffix(sorted.size() + 1, 0.0);
  for (std::size_t k = sorted.size(); k-- > 0;) {
    suffix[k] = suffix[k + 1] + sorted[k];
  }

  double m_prime = std::max(start, 0.0);
  std::size_t saturated = 0;
  for (;;) {
    ++sol.iterations;
    std::size_t next = saturated;
    while (next < sorted.size() && m_prime * sorted[next] >= 1.0) ++next;
    const double updated =
        (m - static_cast<double>(next)) / suffix[next];
    if (next == saturated && sol.iterations > 1) {
      m_prime = updated;
      break;
    }
    saturated = next;
    m_prime = std::max(m_prime, updated);
  }
  sol.m_prime = m_prime;
  return sol;
}

AdaptiveSolution AdaptiveMPrime(const SparseVector& a, std::uint64_t m) {
  if (m == 0) throw ContractError("AdaptiveMPrime: m must be >= 1");
  if (a.empty()) throw ContractError("AdaptiveMPrime: empty vector");
  const double total = ComputeNorms(a).l2_squared;
  std::vector<double> q;
  q.reserve(a.nnz());
  for (const Entry& e : a.entries()) q.push_back(e.value * e.value / total);
  return SolveSaturatingBudget(q, static_cast<double>(m), static_cast<double>(m));
}

SampleSketch ThresholdSketchWithHashes(const SparseVector& a,
                                       std::span<const double> hashes,
                                       std::uint64_t seed, std::uint64_t m,
                                       bool adaptive, Probability probability) {
  if (m == 0) throw ContractError("ThresholdSketch: m must be >= 1");
  if (hashes.size() != a.nnz()) {
    throw ContractError("ThresholdSketch: one hash value per nonzero required");
  }
  SampleSketch s;
  s.method = MakeMethod(Family::kThreshold, probability);
  s.m = m;
  s.seed = seed;
  s.universe_size = a.universe_size();
  s.m_prime = static_cast<double>(m);
  if (probability == Probability::kL1) s.aux = ComputeNorms(a).l1;
  if (probability == Probability::kUniform) s.aux = static_cast<double>(a.nnz());
  if (a.empty()) {
    s.tau = static_cast<double>(m);
    return s;
  }

  const auto entries = a.entries();
  std::vector<double> w(entries.size());
  double total = 0.0;
  for (std::size_t j = 0; j < entries.size(); ++j) {
    w[j] = SamplingWeight(probability, entries[j].value);
    total += w[j];
  }
  if (adaptive) {
    std::vector<double> q(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) q[j] = w[j] / total;
    s.m_prime = SolveSaturatingBudget(q, static_cast<double>(m),
                                      static_cast<double>(m))
                    .m_prime;
  }
  s.tau = s.m_prime / total;

  for (std::size_t j = 0; j < entries.size(); ++j) {
    if (hashes[j] <= w[j] * s.tau) {
      s.keys.push_back(entries[j].index);
      s.values.push_back(entries[j].value);
    }
  }
  return s;
}

SampleSketch ThresholdSketch(const SparseVector& a, std::uint64_t seed,
                             std::uint64_t m, bool adaptive,
                             Probability probability) {
  const auto hashes = HashSupport(a, UniformHasher(seed));
  return ThresholdSketchWithHashes(a, hashes, seed, m, adaptive, probability);
}

double SketchSizeTailFrequency(const SparseVector& a, std::uint64_t m,
                               double delta, std::uint64_t trials,
                               std::uint64_t master_seed, bool adaptive) {
  if (!(delta > 0 && delta < 1)) {
    throw ContractError("SketchSizeTailFrequency: delta must be in (0, 1)");
  }
  if (trials == 0) return 0.0;
  const double bound = static_cast<double>(m) + std::sqrt(m / delta);
  std::uint64_t exceed = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto s = ThresholdSketch(a, DeriveSeed(master_seed, t), m, adaptive);
    if (static_cast<double>(s.size()) > bound) ++exceed;
  }
  return static_cast<double>(exceed) / static_cast<double>(trials);
}

}  // namespace ipsketch
