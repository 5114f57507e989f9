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

#ifndef IPSKETCH_ESTIMATOR_H_
#define IPSKETCH_ESTIMATOR_H_

#include <cstdint>
#include <optional>

#include "ipsketch/sample_sketch.h"
#include "ipsketch/sparse_vector.h"

namespace ipsketch {

struct EstimateReport {
  double estimate = 0.0;       // W
  std::size_t matched_count = 0;  // |K_a ∩ K_b|
  std::optional<double> normalized_error;
};

// Throws ContractError unless the two sketches share seed, universe and
// probability kind. Threshold and priority sketches may be mixed.
void CheckCompatible(const SampleSketch& sa, const SampleSketch& sb);

// W = sum over i in K_a ∩ K_b of a_i b_i / p_i,
// p_i = min(1, w(a_i) tau_a, w(b_i) tau_b).
EstimateReport EstimateInnerProduct(const SampleSketch& sa,
                                    const SampleSketch& sb);

// Fills normalized_error = |W - truth| / (||a||_2 ||b||_2).
EstimateReport EstimateWithTruth(const SampleSketch& sa, const SampleSketch& sb,
                                 const SparseVector& a, const SparseVector& b);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double standard_error = 0.0;
  std::uint64_t trials = 0;
};

// Mean and variance of W over `trials` seeds DeriveSeed(master_seed, t).
// Threshold methods use the adaptive threshold.
Moments MonteCarloMoments(const SparseVector& a, const SparseVector& b,
                          std::uint64_t m, std::uint64_t trials, Method method,
                          std::uint64_t master_seed = 0);

// max(||a_I||^2 ||b||^2, ||a||^2 ||b_I||^2).
double OverlapNormProduct(const SparseVector& a, const SparseVector& b);

// 2/m * OverlapNormProduct for threshold, 2/(m-1) * ... for priority.
double VarianceBound(const SparseVector& a, const SparseVector& b,
                     std::uint64_t m, Family family);

}  // namespace ipsketch

#endif  // IPSKETCH_ESTIMATOR_H_
