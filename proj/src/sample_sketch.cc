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

#include "ipsketch/sample_sketch.h"

#include <array>
#include <string>

#include "ipsketch/error.h"

namespace ipsketch {

namespace {

struct MethodInfo {
  Method method;
  Family family;
  Probability probability;
  std::string_view tag;
};

constexpr std::array<MethodInfo, 6> kMethods = {{
    {Method::kThresholdL2, Family::kThreshold, Probability::kL2, "threshold_l2"},
    {Method::kPriorityL2, Family::kPriority, Probability::kL2, "priority_l2"},
    {Method::kThresholdL1, Family::kThreshold, Probability::kL1, "threshold_l1"},
    {Method::kPriorityL1, Family::kPriority, Probability::kL1, "priority_l1"},
    {Method::kThresholdUniform, Family::kThreshold, Probability::kUniform,
     "threshold_uniform"},
    {Method::kPriorityUniform, Family::kPriority, Probability::kUniform,
     "priority_uniform"},
}};

const MethodInfo& Info(Method method) {
  for (const MethodInfo& info : kMethods) {
    if (info.method == method) return info;
  }
  throw ContractError("unknown method id " +
                      std::to_string(static_cast<int>(method)));
}

}  // namespace

Method MakeMethod(Family family, Probability probability) {
  for (const MethodInfo& info : kMethods) {
    if (info.family == family && info.probability == probability) {
      return info.method;
    }
  }
  throw ContractError("unknown sampling variant");
}

Family FamilyOf(Method method) { return Info(method).family; }

Probability ProbabilityOf(Method method) { return Info(method).probability; }

std::string_view MethodTag(Method method) { return Info(method).tag; }

Method ParseMethodTag(std::string_view tag) {
  std::string valid;
  for (const MethodInfo& info : kMethods) {
    if (info.tag == tag) return info.method;
    if (!valid.empty()) valid += ", ";
    valid += info.tag;
  }
  throw ContractError("unknown method tag '" + std::string(tag) +
                      "'; valid tags: " + valid);
}

double StorageWords(const SampleSketch& sketch) {
  return 1.5 * static_cast<double>(sketch.size()) + 1.0 +
         (sketch.aux.has_value() ? 1.0 : 0.0);
}

std::uint64_t SamplesForBudget(double words) {
  return words <= 0 ? 0 : static_cast<std::uint64_t>(std::floor(words / 1.5));
}

}  // namespace ipsketch
