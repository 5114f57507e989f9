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

#include "ipsketch/sampling_variants.h"

#include <algorithm>

#include "ipsketch/priority_sketch.h"
#include "ipsketch/threshold_sketch.h"

namespace ipsketch {

SampleSketch VariantSketch(const SparseVector& a, std::uint64_t seed,
                           std::uint64_t m, Probability probability,
                           Family family, bool adaptive) {
  if (family == Family::kThreshold) {
    return ThresholdSketch(a, seed, m, adaptive, probability);
  }
  return PrioritySketch(a, seed, m, probability);
}

SampleSketch VariantSketch(const SparseVector& a, std::uint64_t seed,
                           std::uint64_t m, Method method, bool adaptive) {
  return VariantSketch(a, seed, m, ProbabilityOf(method), FamilyOf(method),
                       adaptive);
}

std::vector<double> SamplingProbabilities(const SparseVector& a,
                                          Probability probability) {
  std::vector<double> p;
  p.reserve(a.nnz());
  double total = 0.0;
  for (const Entry& e : a.entries()) {
    p.push_back(SamplingWeight(probability, e.value));
    total += p.back();
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<double> ThresholdInclusionProbabilities(const SparseVector& a,
                                                    double m_prime,
                                                    Probability probability) {
  auto p = SamplingProbabilities(a, probability);
  for (double& x : p) x = std::min(1.0, m_prime * x);
  return p;
}

}  // namespace ipsketch
