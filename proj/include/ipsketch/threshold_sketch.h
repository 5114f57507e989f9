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

#ifndef IPSKETCH_THRESHOLD_SKETCH_H_
#define IPSKETCH_THRESHOLD_SKETCH_H_

#include <cstdint>
#include <span>

#include "ipsketch/sample_sketch.h"
#include "ipsketch/sparse_vector.h"

namespace ipsketch {

struct AdaptiveSolution {
  double m_prime = 0.0;
  // The budget actually solved for: min(m, number of positive weights).
  double target = 0.0;
  // True when the requested m exceeded the number of positive weights.
  bool clamped = false;
  int iterations = 0;
};

// sum_i min(1, m_prime * q_i).
double ExpectedSampleCount(std::span<const double> q, double m_prime);

// Smallest m' >= start with sum_i min(1, m' q_i) == m for nonnegative
// weights q, by the saturated-set fixed point iteration
//   C  <- {i : m' q_i >= 1},   m' <- (m - |C|) / sum_{i not in C} q_i,
// run over weights presorted in decreasing order (O(N log N) total; the
// saturated set grows on every non-final iteration so at most m rounds).
// When m >= #{q_i > 0} every positive weight saturates and m' = 1 / min q_i.
// `start` must satisfy ExpectedSampleCount(q, start) <= m.
AdaptiveSolution SolveSaturatingBudget(std::span<const double> q, double m,
                                       double start);

// m' for l2 threshold sampling: solves sum_i min(1, m' a_i^2/||a||^2) = m.
AdaptiveSolution AdaptiveMPrime(const SparseVector& a, std::uint64_t m);

// Threshold (Poisson) sampling: keeps i iff h(i) <= m' * w_i / sum_j w_j.
// With `adaptive` the expected sample count is exactly min(m, nnz); without
// it m' = m and the expected count is <= m.
SampleSketch ThresholdSketch(const SparseVector& a, std::uint64_t seed,
                             std::uint64_t m, bool adaptive = true,
                             Probability probability = Probability::kL2);

// Same, with the hash values supplied by the caller (hashes[j] is h of
// a.entries()[j]). `seed` is only recorded in the sketch.
SampleSketch ThresholdSketchWithHashes(const SparseVector& a,
                                       std::span<const double> hashes,
                                       std::uint64_t seed, std::uint64_t m,
                                       bool adaptive = true,
                                       Probability probability = Probability::kL2);

// Fraction of `trials` independently seeded l2 threshold sketches with
// |K_a| > m + sqrt(m / delta).
double SketchSizeTailFrequency(const SparseVector& a, std::uint64_t m,
                               double delta, std::uint64_t trials,
                               std::uint64_t master_seed, bool adaptive = true);

}  // namespace ipsketch

#endif  // IPSKETCH_THRESHOLD_SKETCH_H_
