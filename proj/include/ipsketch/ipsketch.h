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

#ifndef IPSKETCH_IPSKETCH_H_
#define IPSKETCH_IPSKETCH_H_

#include "ipsketch/baselines.h"
#include "ipsketch/error.h"
#include "ipsketch/estimator.h"
#include "ipsketch/harness.h"
#include "ipsketch/hashing.h"
#include "ipsketch/join_correlation.h"
#include "ipsketch/priority_sketch.h"
#include "ipsketch/sample_sketch.h"
#include "ipsketch/sampling_variants.h"
#include "ipsketch/serialization.h"
#include "ipsketch/sparse_vector.h"
#include "ipsketch/threshold_sketch.h"

#endif  // IPSKETCH_IPSKETCH_H_
