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

#ifndef IPSKETCH_HARNESS_H_
#define IPSKETCH_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ipsketch/sparse_vector.h"

namespace ipsketch {

// Portable random source: std::mt19937_64's output sequence is fixed by the
// standard, and the conversions below avoid the implementation-defined
// standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Bits() { return engine_(); }
  // Uniform on [0, 1).
  double Unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Unit(); }
  // Uniform on [0, range), range >= 1.
  std::uint64_t Below(std::uint64_t range);

 private:
  std::mt19937_64 engine_;
};

// `count` distinct integers from [0, range), in random order.
std::vector<std::uint64_t> SampleWithoutReplacement(Rng& rng, std::uint64_t range,
                                                    std::uint64_t count);

struct SyntheticSpec {
  Index universe_size = 100000;
  std::uint64_t nnz = 20000;
  double overlap_fraction = 0.1;
  double outlier_fraction = 0.02;
  double outlier_lo = 0.0;
  double outlier_hi = 10.0;
  double value_lo = -1.0;
  double value_hi = 1.0;
  bool binary = false;
  std::optional<double> target_correlation;
  std::uint64_t seed = 0;
};

// round(overlap_fraction * nnz).
std::uint64_t OverlapCount(const SyntheticSpec& spec);

// Two vectors with nnz nonzeros each, exactly OverlapCount shared indices,
// values Uniform[value_lo, value_hi] of which round(outlier_fraction * nnz)
// positions (chosen without replacement) are redrawn from
// Uniform[outlier_lo, outlier_hi]. Binary mode sets every nonzero to 1.
// Throws ConfigError on an infeasible spec.
std::pair<SparseVector, SparseVector> GenPair(const SyntheticSpec& spec);

// GenPair, then on the shared support
//   b = mean_b + sd_b (rho z_a + sqrt(1 - rho^2) z_b)
// where z_a, z_b are the standardized shared values of a and of the
// original b. Requires |rho| <= 1 - 1e-6 and at least 3 shared indices.
std::pair<SparseVector, SparseVector> GenCorrelatedPair(const SyntheticSpec& spec);

// Frequency vectors of two key columns; <a, b> is the join size.
std::pair<SparseVector, SparseVector> JoinSizeVectors(
    std::span<const std::string> keys_a, std::span<const std::string> keys_b,
    Index universe_size = UINT64_MAX);

struct JoinSizeSpec {
  std::uint64_t distinct_keys = 5000;
  std::uint64_t rows_a = 20000;
  std::uint64_t rows_b = 20000;
  double exponent = 1.1;
  // Key k of table b has the popularity rank of key k - key_shift in a.
  std::uint64_t key_shift = 0;
  std::uint64_t seed = 0;
};

// Key-frequency vectors over [0, distinct_keys) of two tables whose rows
// draw keys from a Zipf(exponent) distribution.
std::pair<SparseVector, SparseVector> GenZipfJoinPair(const JoinSizeSpec& spec);

// Methods of the comparison harness.
enum class BenchMethod {
  kTsWeighted,
  kPsWeighted,
  kTsUniform,
  kPsUniform,
  kTsL1,
  kPsL1,
  kJl,
  kCountSketch,
  kMinHash,
  // Correlation only: three independent l2 sketches of a, a^2, 1_a.
  kTsWeightedTriple,
  kPsWeightedTriple,
};

enum class ExperimentKind { kInnerProduct, kBinary, kCorrelation, kJoinSize };

std::string_view BenchMethodTag(BenchMethod method);  // "ts-weighted", ...
std::vector<BenchMethod> ValidMethods(ExperimentKind kind);
// Throws ConfigError listing the tags valid for `kind`.
BenchMethod ParseBenchMethod(std::string_view tag, ExperimentKind kind);
std::string_view ExperimentKindTag(ExperimentKind kind);
ExperimentKind ParseExperimentKind(std::string_view tag);

struct MethodOutcome {
  std::optional<double> estimate;  // empty: undefined correlation
  std::string diagnostic;
  double sketch_size = 0.0;  // mean of the two sketches' sizes
  double seconds_sketch = 0.0;
  double seconds_estimate = 0.0;
};

// Sketches a and b with `method` at a budget of `words` 64-bit words and
// estimates <a, b>. Sampling methods get floor(words / 1.5) samples.
MethodOutcome RunInnerProductMethod(BenchMethod method, const SparseVector& a,
                                    const SparseVector& b, double words,
                                    std::uint64_t seed);

// Same for the post-join correlation of a and b. Optimized global sketches
// for ts/ps-weighted, three sketches for the *-triple and linear methods,
// Pearson of matched samples for the uniform methods.
MethodOutcome RunCorrelationMethod(BenchMethod method, const SparseVector& a,
                                   const SparseVector& b, double words,
                                   std::uint64_t seed);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kInnerProduct;
  std::vector<BenchMethod> methods;
  std::vector<double> budgets;  // storage words
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::vector<SyntheticSpec> specs;     // ip, binary, corr
  std::vector<JoinSizeSpec> join_specs;  // joinsize
};

// Parses the JSON experiment description (see README). Throws ConfigError.
ExperimentConfig ParseExperimentConfig(std::string_view json_text);

struct ResultRow {
  std::string method;
  std::size_t spec = 0;
  double overlap = 0.0;
  double storage_words = 0.0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> estimate;
  double truth = 0.0;
  std::optional<double> normalized_error;
  double sketch_size = 0.0;
  double seconds_sketch = 0.0;
  double seconds_estimate = 0.0;
};

// One row per (spec, method, budget, trial) in that order. Trials run on
// HarnessThreads() workers; the output does not depend on the thread count.
std::vector<ResultRow> RunExperiment(const ExperimentConfig& config);

// IPSKETCH_THREADS when set to a positive integer, else the hardware
// concurrency.
unsigned HarnessThreads();

struct SummaryRow {
  std::string method;
  std::size_t spec = 0;
  double overlap = 0.0;
  double storage_words = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t undefined = 0;  // trials without an estimate
  double mean_error = 0.0;
  double r_squared = 0.0;  // of estimate vs truth over defined trials
  double mean_sketch_size = 0.0;
};

std::vector<SummaryRow> Summarize(std::span<const ResultRow> rows);

// Timing columns are written only with `include_timing`, so that the default
// output is byte-identical across runs.
void WriteResultsCsv(std::ostream& out, std::span<const ResultRow> rows,
                     bool include_timing = false);
void WriteSummaryCsv(std::ostream& out, std::span<const SummaryRow> rows);

// Reads the config at `config_path`, runs it and writes both CSV files.
void RunGrid(const std::filesystem::path& config_path,
             const std::filesystem::path& results_path,
             const std::filesystem::path& summary_path,
             bool include_timing = false);

}  // namespace ipsketch

#endif  // IPSKETCH_HARNESS_H_
