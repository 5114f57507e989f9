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

#include "ipsketch/estimator.h"

#include <cmath>
#include <limits>
#include <string>

#include "ipsketch/error.h"
#include "ipsketch/hashing.h"
#include "ipsketch/sampling_variants.h"

namespace ipsketch {

void CheckCompatible(const SampleSketch& sa, const SampleSketch& sb) {
  if (sa.seed != sb.seed) {
    throw ContractError("sketches were built with different seeds (" +
                        std::to_string(sa.seed) + " vs " +
                        std::to_string(sb.seed) + ")");
  }
  if (sa.universe_size != sb.universe_size) {
    throw DimensionError("sketches cover different universes");
  }
  if (ProbabilityOf(sa.method) != ProbabilityOf(sb.method)) {
    throw ContractError(std::string("incompatible sampling probabilities: ") +
                        std::string(MethodTag(sa.method)) + " vs " +
                        std::string(MethodTag(sb.method)));
  }
}

EstimateReport EstimateInnerProduct(const SampleSketch& sa,
                                    const SampleSketch& sb) {
  CheckCompatible(sa, sb);
  EstimateReport r;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa.keys[i] < sb.keys[j]) {
      ++i;
    } else if (sb.keys[j] < sa.keys[i]) {
      ++j;
    } else {
      double p = std::min(sa.InclusionProbability(i), sb.InclusionProbability(j));
      p = std::max(p, std::numeric_limits<double>::min());
      r.estimate += sa.values[i] * sb.values[j] / p;
      ++r.matched_count;
      ++i;
      ++j;
    }
  }
  return r;
}

EstimateReport EstimateWithTruth(const SampleSketch& sa, const SampleSketch& sb,
                                 const SparseVector& a, const SparseVector& b) {
  EstimateReport r = EstimateInnerProduct(sa, sb);
  const double scale = std::sqrt(ComputeNorms(a).l2_squared *
                                 ComputeNorms(b).l2_squared);
  const double truth = ExactInnerProduct(a, b);
  r.normalized_error = scale > 0 ? std::abs(r.estimate - truth) / scale
                                 : std::abs(r.estimate - truth);
  return r;
}

Moments MonteCarloMoments(const SparseVector& a, const SparseVector& b,
                          std::uint64_t m, std::uint64_t trials, Method method,
                          std::uint64_t master_seed) {
  Moments out;
  out.trials = trials;
  if (trials == 0) return out;
  // Welford.
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t seed = DeriveSeed(master_seed, t);
    const double w =
        EstimateInnerProduct(VariantSketch(a, seed, m, method),
                             VariantSketch(b, seed, m, method))
            .estimate;
    const double delta = w - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (w - mean);
  }
  out.mean = mean;
  out.variance = trials > 1 ? m2 / static_cast<double>(trials - 1) : 0.0;
  out.standard_error = std::sqrt(out.variance / static_cast<double>(trials));
  return out;
}

double OverlapNormProduct(const SparseVector& a, const SparseVector& b) {
  const double a2 = ComputeNorms(a).l2_squared;
  const double b2 = ComputeNorms(b).l2_squared;
  return std::max(RestrictedL2Squared(a, b) * b2, a2 * RestrictedL2Squared(b, a));
}

double VarianceBound(const SparseVector& a, const SparseVector& b,
                     std::uint64_t m, Family family) {
  const double denom = family == Family::kThreshold
                           ? static_cast<double>(m)
                           : static_cast<double>(m) - 1.0;
  if (denom <= 0) return kInfinity;
  return 2.0 / denom * OverlapNormProduct(a, b);
}

}  // namespace ipsketch
