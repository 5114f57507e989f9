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

#ifndef IPSKETCH_SAMPLING_VARIANTS_H_
#define IPSKETCH_SAMPLING_VARIANTS_H_

#include <cstdint>
#include <vector>

#include "ipsketch/sample_sketch.h"
#include "ipsketch/sparse_vector.h"

namespace ipsketch {

// Threshold or priority sampling with l2 (a_i^2/||a||_2^2), l1
// (|a_i|/||a||_1, i.e. End-Biased sampling for the threshold family) or
// uniform (1/N on the support; the priority form is a KMV sketch) sampling
// probabilities. Threshold variants use the adaptive threshold unless
// `adaptive` is false.
SampleSketch VariantSketch(const SparseVector& a, std::uint64_t seed,
                           std::uint64_t m, Probability probability,
                           Family family, bool adaptive = true);

SampleSketch VariantSketch(const SparseVector& a, std::uint64_t seed,
                           std::uint64_t m, Method method,
                           bool adaptive = true);

// p_i(a) for every stored entry (sums to 1).
std::vector<double> SamplingProbabilities(const SparseVector& a,
                                          Probability probability);

// min(1, m' p_i(a)) for every stored entry: the marginal inclusion
// probabilities of a threshold sketch with size parameter m'.
std::vector<double> ThresholdInclusionProbabilities(const SparseVector& a,
                                                    double m_prime,
                                                    Probability probability);

}  // namespace ipsketch

#endif  // IPSKETCH_SAMPLING_VARIANTS_H_
