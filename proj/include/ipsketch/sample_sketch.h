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

#ifndef IPSKETCH_SAMPLE_SKETCH_H_
#define IPSKETCH_SAMPLE_SKETCH_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "ipsketch/sparse_vector.h"

namespace ipsketch {

enum class Family : std::uint8_t { kThreshold = 0, kPriority = 1 };

// How the per-entry sampling weight w_i is derived from a_i.
enum class Probability : std::uint8_t {
  kL2 = 0,       // w_i = a_i^2
  kL1 = 1,       // w_i = |a_i|
  kUniform = 2,  // w_i = 1 on the support
};

// Wire values are part of the binary format; do not renumber.
enum class Method : std::uint8_t {
  kThresholdL2 = 1,
  kPriorityL2 = 2,
  kThresholdL1 = 3,
  kPriorityL1 = 4,
  kThresholdUniform = 5,
  kPriorityUniform = 6,
};

Method MakeMethod(Family family, Probability probability);
Family FamilyOf(Method method);
Probability ProbabilityOf(Method method);

// "threshold_l2", "priority_uniform", ...
std::string_view MethodTag(Method method);
// Throws ContractError listing the valid tags.
Method ParseMethodTag(std::string_view tag);

inline double SamplingWeight(Probability probability, double value) {
  switch (probability) {
    case Probability::kL2:
      return value * value;
    case Probability::kL1:
      return std::abs(value);
    case Probability::kUniform:
      return 1.0;
  }
  return 0.0;
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Coordinated sample of a vector: S(a) = {K_a, V_a, tau_a}.
//
// `tau` is normalized so that the probability that entry i survives is
// min(1, SamplingWeight(probability, a_i) * tau). For threshold sampling
// tau = m' / sum_i w_i; for priority sampling tau is the (m+1)-st smallest
// rank h(i) / w_i, or +infinity when a has at most m nonzeros.
struct SampleSketch {
  Method method = Method::kPriorityL2;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  Index universe_size = 1;
  double tau = kInfinity;
  // Threshold only: the effective size parameter m' (== m when not adaptive).
  double m_prime = 0.0;
  // ||a||_1 for l1 methods, nnz(a) for uniform methods, absent for l2.
  std::optional<double> aux;
  std::vector<Index> keys;    // strictly increasing
  std::vector<double> values;  // values[j] == a[keys[j]]

  std::size_t size() const { return keys.size(); }

  double Weight(std::size_t j) const {
    return SamplingWeight(ProbabilityOf(method), values[j]);
  }

  // Marginal probability that keys[j] enters this sketch.
  double InclusionProbability(std::size_t j) const {
    return std::min(1.0, Weight(j) * tau);
  }

  friend bool operator==(const SampleSketch&, const SampleSketch&) = default;
};

// 64-bit-word equivalents: 1.5 words per sample (64-bit value + 32-bit
// hash/index) plus one word per stored scalar.
double StorageWords(const SampleSketch& sketch);

// Samples that fit into a word budget (scalars not charged).
std::uint64_t SamplesForBudget(double words);

}  // namespace ipsketch

#endif  // IPSKETCH_SAMPLE_SKETCH_H_
