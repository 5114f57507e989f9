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

#ifndef IPSKETCH_JOIN_CORRELATION_H_
#define IPSKETCH_JOIN_CORRELATION_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipsketch/baselines.h"
#include "ipsketch/sample_sketch.h"
#include "ipsketch/sparse_vector.h"

namespace ipsketch {

// The six inner products from which the post-join Pearson correlation of
// two columns is assembled. With a, b the value vectors over the key
// universe, a2/b2 their entrywise squares and 1a/1b their indicators:
struct JoinInnerProducts {
  double n = 0.0;       // <1a, 1b>  join size
  double sum_x = 0.0;   // <a, 1b>
  double sum_y = 0.0;   // <1a, b>
  double ip_xy = 0.0;   // <a, b>
  double sum_x2 = 0.0;  // <a2, 1b>
  double sum_y2 = 0.0;  // <1a, b2>
};

// A correlation estimate. `rho` is empty (the undefined marker) when a
// variance term is non-positive: a constant joined column, or sampling
// noise pushing an estimated variance below zero.
struct CorrelationResult {
  std::optional<double> rho;
  std::string diagnostic;
};

// (n <x,y> - Sx Sy) / (sqrt(n Sx2 - Sx^2) sqrt(n Sy2 - Sy^2)), clamped to
// [-1, 1]. Throws NoOverlapError when n <= 0. A variance term counts as
// non-positive when it is <= `tolerance` times its own scale (n * Sx2).
CorrelationResult CorrelationFormula(const JoinInnerProducts& ip,
                                     double tolerance = 1e-12);

JoinInnerProducts ExactJoinInnerProducts(const SparseVector& a,
                                         const SparseVector& b);

// Global sample S_G(a): one key/value sample serving a, a^2 and 1_a, with
// one normalizer per view. Entry i survives with probability
//   T_i(a) = min(1, max(tau_indicator, a_i^2 tau_base, a_i^4 tau_squared)).
struct CorrelationSketch {
  Family family = Family::kPriority;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  Index universe_size = 1;
  double tau_indicator = kInfinity;
  double tau_base = kInfinity;
  double tau_squared = kInfinity;
  // Threshold: the solved m'. Priority: mean of the per-view counts.
  double m_prime = 0.0;
  // Priority only: per-view sample counts (indicator, base, squared).
  std::array<std::uint64_t, 3> view_counts{};
  std::vector<Index> keys;
  std::vector<double> values;  // raw a_i

  std::size_t size() const { return keys.size(); }

  double InclusionProbability(std::size_t j) const;

  friend bool operator==(const CorrelationSketch&,
                         const CorrelationSketch&) = default;
};

// 1.5 words per sample plus the three view normalizers.
inline double StorageWords(const CorrelationSketch& s) {
  return 1.5 * static_cast<double>(s.size()) + 3.0;
}

// Per-entry global weight q_i = max(a_i^2/||a||^2, 1/N, a_i^4/||a^2||^2),
// so that T_i(a) = min(1, m' q_i).
std::vector<double> GlobalThresholdWeights(const SparseVector& a);

// Threshold sampling for join correlation: m' solved from budget/3 upward so
// that sum_i min(1, T_i(a)) == budget (all entries kept when
// budget >= nnz).
CorrelationSketch CorrelationThresholdSketch(const SparseVector& a,
                                             std::uint64_t seed,
                                             std::uint64_t budget);

CorrelationSketch CorrelationThresholdSketchWithHashes(
    const SparseVector& a, std::span<const double> hashes, std::uint64_t seed,
    std::uint64_t budget);

// Priority sampling for join correlation. Three rank functions
// h(i), h(i)/a_i^2, h(i)/a_i^4; an index is kept when it is among the m_f
// smallest of any view f, and tau of view f is the (m_f+1)-st smallest rank
// of that view. The counts m_f are found by binary search so that exactly
// `budget` indices are kept (every nonzero when nnz <= budget).
CorrelationSketch CorrelationPrioritySketch(const SparseVector& a,
                                            std::uint64_t seed,
                                            std::uint64_t budget);

CorrelationSketch CorrelationPrioritySketchWithHashes(
    const SparseVector& a, std::span<const double> hashes, std::uint64_t seed,
    std::uint64_t budget);

// W_<f(a), g(b)> = sum_{i in K_a ∩ K_b} f(a_i) g(b_i) / min(T_i(a), T_i(b))
// for all six (f, g) pairs at once.
JoinInnerProducts EstimateJoinInnerProducts(const CorrelationSketch& ga,
                                            const CorrelationSketch& gb);

CorrelationResult EstimateJoinCorrelation(const CorrelationSketch& ga,
                                          const CorrelationSketch& gb);

// The unoptimized reduction: independent sample sketches of a, a^2, 1_a.
struct TripleSampleSketch {
  SampleSketch base;
  SampleSketch squared;
  SampleSketch indicator;
};

// Each view gets floor(budget / 3) samples of the given method.
TripleSampleSketch MakeTripleSampleSketch(const SparseVector& a,
                                          std::uint64_t seed,
                                          std::uint64_t budget, Method method);

JoinInnerProducts EstimateJoinInnerProducts(const TripleSampleSketch& ta,
                                            const TripleSampleSketch& tb);

// Linear-sketch reduction: floor(words / 3) coordinates per view.
struct TripleLinearSketch {
  LinearSketch base;
  LinearSketch squared;
  LinearSketch indicator;
};

TripleLinearSketch MakeTripleLinearSketch(const SparseVector& a,
                                          std::uint64_t seed,
                                          std::uint64_t words, LinearKind kind);

JoinInnerProducts EstimateJoinInnerProducts(const TripleLinearSketch& ta,
                                            const TripleLinearSketch& tb);

// Pearson correlation of the matched samples of two plain sample sketches
// (the KMV correlation sketch approach for uniform samples).
CorrelationResult SampledPairsCorrelation(const SampleSketch& sa,
                                          const SampleSketch& sb);

// Plain two-pass Pearson correlation of paired columns.
CorrelationResult PearsonCorrelation(std::span<const double> x,
                                     std::span<const double> y);

// The joined columns (x_i, y_i) for i in supp(a) ∩ supp(b).
std::pair<std::vector<double>, std::vector<double>> JoinColumns(
    const SparseVector& a, const SparseVector& b);

}  // namespace ipsketch

#endif  // IPSKETCH_JOIN_CORRELATION_H_
