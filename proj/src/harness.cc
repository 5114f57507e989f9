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

#include "ipsketch/harness.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "ipsketch/baselines.h"
#include "ipsketch/error.h"
#include "ipsketch/estimator.h"
#include "ipsketch/hashing.h"
#include "ipsketch/join_correlation.h"
#include "ipsketch/sample_sketch.h"
#include "ipsketch/sampling_variants.h"
#include "json.hpp"

namespace ipsketch {

std::uint64_t Rng::Below(std::uint64_t range) {
  // Lemire's nearly divisionless method.
  unsigned __int128 product = static_cast<unsigned __int128>(Bits()) * range;
  auto low = static_cast<std::uint64_t>(product);
  if (low < range) {
    const std::uint64_t threshold = -range % range;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(Bits()) * range;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

std::vector<std::uint64_t> SampleWithoutReplacement(Rng& rng, std::uint64_t range,
                                                    std::uint64_t count) {
  if (count > range) throw ConfigError("cannot draw more distinct values than the range holds");
  std::vector<std::uint64_t> out;
  out.reserve(count);
  if (range <= (1u << 24) || range / 4 <= count) {
    // Partial Fisher-Yates.
    std::vector<std::uint64_t> pool(range);
    std::iota(pool.begin(), pool.end(), std::uint64_t{0});
    for (std::uint64_t k = 0; k < count; ++k) {
      std::swap(pool[k], pool[k + rng.Below(range - k)]);
      out.push_back(pool[k]);
    }
    return out;
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  while (out.size() < count) {
    const std::uint64_t x = rng.Below(range);
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

std::uint64_t OverlapCount(const SyntheticSpec& spec) {
  return static_cast<std::uint64_t>(
      std::llround(spec.overlap_fraction * static_cast<double>(spec.nnz)));
}

namespace {

void ValidateSpec(const SyntheticSpec& spec) {
  if (spec.universe_size == 0) throw ConfigError("universe_size must be >= 1");
  if (!(spec.overlap_fraction >= 0.0 && spec.overlap_fraction <= 1.0)) {
    throw ConfigError("overlap must lie in [0, 1]");
  }
  if (!(spec.outlier_fraction >= 0.0 && spec.outlier_fraction <= 1.0)) {
    throw ConfigError("outlier_fraction must lie in [0, 1]");
  }
  if (!(spec.value_lo < spec.value_hi) || !(spec.outlier_lo < spec.outlier_hi)) {
    throw ConfigError("value ranges must satisfy lo < hi");
  }
  const std::uint64_t shared = OverlapCount(spec);
  if (spec.nnz > spec.universe_size ||
      2 * spec.nnz - shared > spec.universe_size) {
    throw ConfigError("spec needs " + std::to_string(2 * spec.nnz - shared) +
                      " distinct indices but the universe has " +
                      std::to_string(spec.universe_size));
  }
}

double NonzeroUniform(Rng& rng, double lo, double hi) {
  double v = 0.0;
  while (v == 0.0) v = rng.Uniform(lo, hi);
  return v;
}

std::vector<double> DrawValues(Rng& rng, const SyntheticSpec& spec) {
  std::vector<double> values(spec.nnz, 1.0);
  if (spec.binary) return values;
  for (double& v : values) v = NonzeroUniform(rng, spec.value_lo, spec.value_hi);
  const auto outliers = static_cast<std::uint64_t>(
      std::llround(spec.outlier_fraction * static_cast<double>(spec.nnz)));
  for (std::uint64_t pos : SampleWithoutReplacement(rng, spec.nnz, outliers)) {
    values[pos] = NonzeroUniform(rng, spec.outlier_lo, spec.outlier_hi);
  }
  return values;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd Standardization(std::span<const double> x) {
  MeanSd r;
  r.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - r.mean) * (v - r.mean);
  r.sd = std::sqrt(ss / static_cast<double>(x.size()));
  return r;
}

double Seconds(std::chrono::steady_clock::time_point from,
               std::chrono::steady_clock::time_point to) {
  return std::chrono::duration<double>(to - from).count();
}

}  // namespace

std::pair<SparseVector, SparseVector> GenPair(const SyntheticSpec& spec) {
  ValidateSpec(spec);
  Rng rng(spec.seed);
  const std::uint64_t shared = OverlapCount(spec);
  const std::uint64_t own = spec.nnz - shared;
  // [shared | a only | b only]
  const auto idx = SampleWithoutReplacement(rng, spec.universe_size, shared + 2 * own);
  const auto va = DrawValues(rng, spec);
  const auto vb = DrawValues(rng, spec);
  std::vector<Entry> ea, eb;
  ea.reserve(spec.nnz);
  eb.reserve(spec.nnz);
  for (std::uint64_t k = 0; k < spec.nnz; ++k) {
    ea.push_back({idx[k], va[k]});
    eb.push_back({idx[k < shared ? k : k + own], vb[k]});
  }
  return {SparseVector(spec.universe_size, std::move(ea)),
          SparseVector(spec.universe_size, std::move(eb))};
}

std::pair<SparseVector, SparseVector> GenCorrelatedPair(const SyntheticSpec& spec) {
  if (!spec.target_correlation) throw ConfigError("target_correlation is not set");
  const double rho = *spec.target_correlation;
  if (!(std::abs(rho) <= 1.0 - 1e-6)) {
    throw ConfigError("target correlation must satisfy |rho| <= 1 - 1e-6");
  }
  if (OverlapCount(spec) < 3) {
    throw ConfigError("correlation is undefined with fewer than 3 shared indices");
  }
  auto [a, b] = GenPair(spec);
  const auto [xa, xb] = JoinColumns(a, b);
  const MeanSd sa = Standardization(xa);
  const MeanSd sb = Standardization(xb);
  if (!(sa.sd > 0.0) || !(sb.sd > 0.0)) {
    throw ConfigError("shared values are constant; correlation is undefined");
  }
  const double noise = std::sqrt(1.0 - rho * rho);
  std::vector<Entry> eb(b.entries().begin(), b.entries().end());
  std::size_t k = 0;
  for (Entry& e : eb) {
    if (!a.contains(e.index)) continue;
    const double za = (xa[k] - sa.mean) / sa.sd;
    const double zb = (xb[k] - sb.mean) / sb.sd;
    e.value = sb.mean + sb.sd * (rho * za + noise * zb);
    if (e.value == 0.0) e.value = std::numeric_limits<double>::min();
    ++k;
  }
  return {std::move(a), SparseVector(spec.universe_size, std::move(eb))};
}

std::pair<SparseVector, SparseVector> JoinSizeVectors(
    std::span<const std::string> keys_a, std::span<const std::string> keys_b,
    Index universe_size) {
  return {KeyFrequencyVector(keys_a, universe_size),
          KeyFrequencyVector(keys_b, universe_size)};
}

std::pair<SparseVector, SparseVector> GenZipfJoinPair(const JoinSizeSpec& spec) {
  if (spec.distinct_keys == 0) throw ConfigError("distinct_keys must be >= 1");
  if (!(spec.exponent >= 0.0)) throw ConfigError("exponent must be >= 0");
  const std::uint64_t k = spec.distinct_keys;
  std::vector<double> cdf(k);
  double total = 0.0;
  for (std::uint64_t r = 0; r < k; ++r) {
    total += std::pow(static_cast<double>(r + 1), -spec.exponent);
    cdf[r] = total;
  }
  Rng rng(spec.seed);
  auto draw_counts = [&](std::uint64_t rows, std::uint64_t shift) {
    std::vector<double> counts(k, 0.0);
    for (std::uint64_t row = 0; row < rows; ++row) {
      const double u = rng.Unit() * total;
      const auto rank = static_cast<std::uint64_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      counts[(std::min(rank, k - 1) + shift) % k] += 1.0;
    }
    return counts;
  };
  const auto ca = draw_counts(spec.rows_a, 0);
  const auto cb = draw_counts(spec.rows_b, spec.key_shift % k);
  return {SparseVector::FromDense(ca), SparseVector::FromDense(cb)};
}

namespace {

struct MethodInfo {
  BenchMethod method;
  std::string_view tag;
};

constexpr MethodInfo kMethods[] = {
    {BenchMethod::kTsWeighted, "ts-weighted"},
    {BenchMethod::kPsWeighted, "ps-weighted"},
    {BenchMethod::kTsUniform, "ts-uniform"},
    {BenchMethod::kPsUniform, "ps-uniform"},
    {BenchMethod::kTsL1, "ts-l1"},
    {BenchMethod::kPsL1, "ps-l1"},
    {BenchMethod::kJl, "jl"},
    {BenchMethod::kCountSketch, "cs"},
    {BenchMethod::kMinHash, "mh"},
    {BenchMethod::kTsWeightedTriple, "ts-weighted-triple"},
    {BenchMethod::kPsWeightedTriple, "ps-weighted-triple"},
};

std::optional<Method> SamplingMethod(BenchMethod method) {
  switch (method) {
    case BenchMethod::kTsWeighted:
      return Method::kThresholdL2;
    case BenchMethod::kPsWeighted:
      return Method::kPriorityL2;
    case BenchMethod::kTsUniform:
      return Method::kThresholdUniform;
    case BenchMethod::kPsUniform:
      return Method::kPriorityUniform;
    case BenchMethod::kTsL1:
      return Method::kThresholdL1;
    case BenchMethod::kPsL1:
      return Method::kPriorityL1;
    default:
      return std::nullopt;
  }
}

std::uint64_t SampleCount(double words) {
  const std::uint64_t m = SamplesForBudget(words);
  if (m == 0) throw ConfigError("budget of " + std::to_string(words) + " words holds no sample");
  return m;
}

std::uint64_t LinearSize(double words) {
  const auto m = static_cast<std::uint64_t>(std::floor(words));
  if (m == 0) throw ConfigError("budget must be >= 1 word");
  return m;
}

}  // namespace

std::string_view BenchMethodTag(BenchMethod method) {
  for (const auto& info : kMethods) {
    if (info.method == method) return info.tag;
  }
  return "unknown";
}

std::vector<BenchMethod> ValidMethods(ExperimentKind kind) {
  using B = BenchMethod;
  if (kind == ExperimentKind::kCorrelation) {
    return {B::kTsWeighted,       B::kPsWeighted,       B::kTsUniform,
            B::kPsUniform,        B::kJl,               B::kCountSketch,
            B::kTsWeightedTriple, B::kPsWeightedTriple};
  }
  return {B::kTsWeighted, B::kPsWeighted, B::kTsUniform, B::kPsUniform, B::kTsL1,
          B::kPsL1,       B::kJl,         B::kCountSketch, B::kMinHash};
}

BenchMethod ParseBenchMethod(std::string_view tag, ExperimentKind kind) {
  const auto valid = ValidMethods(kind);
  for (BenchMethod m : valid) {
    if (BenchMethodTag(m) == tag) return m;
  }
  std::string list;
  for (BenchMethod m : valid) {
    if (!list.empty()) list += ", ";
    list += BenchMethodTag(m);
  }
  throw ConfigError("unknown method '" + std::string(tag) + "' for experiment '" +
                    std::string(ExperimentKindTag(kind)) + "'; valid: " + list);
}

std::string_view ExperimentKindTag(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kInnerProduct:
      return "ip";
    case ExperimentKind::kBinary:
      return "binary";
    case ExperimentKind::kCorrelation:
      return "corr";
    case ExperimentKind::kJoinSize:
      return "joinsize";
  }
  return "";
}

ExperimentKind ParseExperimentKind(std::string_view tag) {
  for (auto k : {ExperimentKind::kInnerProduct, ExperimentKind::kBinary,
                 ExperimentKind::kCorrelation, ExperimentKind::kJoinSize}) {
    if (ExperimentKindTag(k) == tag) return k;
  }
  throw ConfigError("unknown experiment '" + std::string(tag) +
                    "'; valid: ip, binary, corr, joinsize");
}

MethodOutcome RunInnerProductMethod(BenchMethod method, const SparseVector& a,
                                    const SparseVector& b, double words,
                                    std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  MethodOutcome out;
  const auto t0 = Clock::now();
  if (auto sampling = SamplingMethod(method)) {
    const std::uint64_t m = SampleCount(words);
    const SampleSketch sa = VariantSketch(a, seed, m, *sampling);
    const SampleSketch sb = VariantSketch(b, seed, m, *sampling);
    const auto t1 = Clock::now();
    out.estimate = EstimateInnerProduct(sa, sb).estimate;
    out.seconds_sketch = Seconds(t0, t1);
    out.seconds_estimate = Seconds(t1, Clock::now());
    out.sketch_size = 0.5 * static_cast<double>(sa.size() + sb.size());
    return out;
  }
  if (method == BenchMethod::kJl || method == BenchMethod::kCountSketch) {
    const LinearKind kind =
        method == BenchMethod::kJl ? LinearKind::kJl : LinearKind::kCountSketch;
    const std::uint64_t m = LinearSize(words);
    const LinearSketch sa = MakeLinearSketch(kind, a, seed, m);
    const LinearSketch sb = MakeLinearSketch(kind, b, seed, m);
    const auto t1 = Clock::now();
    out.estimate = LinearEstimate(sa, sb);
    out.seconds_sketch = Seconds(t0, t1);
    out.seconds_estimate = Seconds(t1, Clock::now());
    out.sketch_size = static_cast<double>(m);
    return out;
  }
  if (method == BenchMethod::kMinHash) {
    const std::uint64_t m = SampleCount(words);
    const MinHashSketch sa = MinHash(a, seed, m);
    const MinHashSketch sb = MinHash(b, seed, m);
    const auto t1 = Clock::now();
    out.estimate = MinHashInnerProduct(sa, sb).estimate;
    out.seconds_sketch = Seconds(t0, t1);
    out.seconds_estimate = Seconds(t1, Clock::now());
    out.sketch_size = static_cast<double>(m);
    return out;
  }
  throw ConfigError("method '" + std::string(BenchMethodTag(method)) +
                    "' does not estimate inner products");
}

MethodOutcome RunCorrelationMethod(BenchMethod method, const SparseVector& a,
                                   const SparseVector& b, double words,
                                   std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  MethodOutcome out;
  auto finish = [&out](CorrelationResult r) {
    out.estimate = r.rho;
    out.diagnostic = std::move(r.diagnostic);
  };
  const auto t0 = Clock::now();
  auto t1 = t0;
  try {
    switch (method) {
      case BenchMethod::kTsWeighted:
      case BenchMethod::kPsWeighted: {
        const std::uint64_t m = SampleCount(words);
        const bool ts = method == BenchMethod::kTsWeighted;
        const CorrelationSketch ga = ts ? CorrelationThresholdSketch(a, seed, m)
                                        : CorrelationPrioritySketch(a, seed, m);
        const CorrelationSketch gb = ts ? CorrelationThresholdSketch(b, seed, m)
                                        : CorrelationPrioritySketch(b, seed, m);
        t1 = Clock::now();
        out.sketch_size = 0.5 * static_cast<double>(ga.size() + gb.size());
        finish(EstimateJoinCorrelation(ga, gb));
        break;
      }
      case BenchMethod::kTsWeightedTriple:
      case BenchMethod::kPsWeightedTriple: {
        const Method kind = method == BenchMethod::kTsWeightedTriple
                                ? Method::kThresholdL2
                                : Method::kPriorityL2;
        const std::uint64_t m = SampleCount(words);
        const TripleSampleSketch ta = MakeTripleSampleSketch(a, seed, m, kind);
        const TripleSampleSketch tb = MakeTripleSampleSketch(b, seed, m, kind);
        t1 = Clock::now();
        out.sketch_size =
            0.5 * static_cast<double>(ta.base.size() + ta.squared.size() +
                                      ta.indicator.size() + tb.base.size() +
                                      tb.squared.size() + tb.indicator.size());
        finish(CorrelationFormula(EstimateJoinInnerProducts(ta, tb)));
        break;
      }
      case BenchMethod::kTsUniform:
      case BenchMethod::kPsUniform: {
        const std::uint64_t m = SampleCount(words);
        const SampleSketch sa = VariantSketch(a, seed, m, *SamplingMethod(method));
        const SampleSketch sb = VariantSketch(b, seed, m, *SamplingMethod(method));
        t1 = Clock::now();
        out.sketch_size = 0.5 * static_cast<double>(sa.size() + sb.size());
        finish(SampledPairsCorrelation(sa, sb));
        break;
      }
      case BenchMethod::kJl:
      case BenchMethod::kCountSketch: {
        const LinearKind kind =
            method == BenchMethod::kJl ? LinearKind::kJl : LinearKind::kCountSketch;
        const std::uint64_t words_int = LinearSize(words);
        const TripleLinearSketch ta = MakeTripleLinearSketch(a, seed, words_int, kind);
        const TripleLinearSketch tb = MakeTripleLinearSketch(b, seed, words_int, kind);
        t1 = Clock::now();
        out.sketch_size = static_cast<double>(3 * (words_int / 3));
        finish(CorrelationFormula(EstimateJoinInnerProducts(ta, tb)));
        break;
      }
      default:
        throw ConfigError("method '" + std::string(BenchMethodTag(method)) +
                          "' does not estimate join correlation");
    }
  } catch (const NoOverlapError& e) {
    if (t1 == t0) t1 = Clock::now();
    out.estimate.reset();
    out.diagnostic = e.what();
  }
  out.seconds_sketch = Seconds(t0, t1);
  out.seconds_estimate = Seconds(t1, Clock::now());
  return out;
}

namespace {

using nlohmann::json;

void RejectUnknownKeys(const json& j, std::initializer_list<std::string_view> known,
                       std::string_view where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown field '" + key + "' in " + std::string(where));
    }
  }
}

std::pair<double, double> ReadRange(const json& j) {
  const auto r = j.get<std::vector<double>>();
  if (r.size() != 2) throw ConfigError("ranges are written as [lo, hi]");
  return {r[0], r[1]};
}

SyntheticSpec ParseSyntheticSpec(const json& j) {
  RejectUnknownKeys(j,
                    {"universe_size", "nnz", "overlap", "outlier_fraction",
                     "outlier_range", "value_range", "binary", "target_correlation"},
                    "spec");
  SyntheticSpec s;
  s.universe_size = j.value("universe_size", s.universe_size);
  s.nnz = j.value("nnz", s.nnz);
  s.overlap_fraction = j.value("overlap", s.overlap_fraction);
  s.outlier_fraction = j.value("outlier_fraction", s.outlier_fraction);
  if (j.contains("outlier_range")) {
    std::tie(s.outlier_lo, s.outlier_hi) = ReadRange(j.at("outlier_range"));
  }
  if (j.contains("value_range")) {
    std::tie(s.value_lo, s.value_hi) = ReadRange(j.at("value_range"));
  }
  s.binary = j.value("binary", false);
  if (j.contains("target_correlation")) {
    s.target_correlation = j.at("target_correlation").get<double>();
  }
  ValidateSpec(s);
  return s;
}

JoinSizeSpec ParseJoinSizeSpec(const json& j) {
  RejectUnknownKeys(j, {"distinct_keys", "rows_a", "rows_b", "exponent", "key_shift"},
                    "spec");
  JoinSizeSpec s;
  s.distinct_keys = j.value("distinct_keys", s.distinct_keys);
  s.rows_a = j.value("rows_a", s.rows_a);
  s.rows_b = j.value("rows_b", s.rows_b);
  s.exponent = j.value("exponent", s.exponent);
  s.key_shift = j.value("key_shift", s.key_shift);
  if (s.distinct_keys == 0) throw ConfigError("distinct_keys must be >= 1");
  return s;
}

}  // namespace

ExperimentConfig ParseExperimentConfig(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    RejectUnknownKeys(j, {"experiment", "methods", "budgets", "trials", "seed", "specs"},
                      "config");
    ExperimentConfig c;
    c.kind = ParseExperimentKind(j.value("experiment", std::string("ip")));
    for (const auto& tag : j.value("methods", std::vector<std::string>{})) {
      c.methods.push_back(ParseBenchMethod(tag, c.kind));
    }
    c.budgets = j.value("budgets", std::vector<double>{});
    for (double w : c.budgets) {
      if (!(w >= 1.0)) throw ConfigError("budgets must be >= 1 word");
    }
    c.trials = j.value("trials", std::uint64_t{1});
    c.seed = j.value("seed", std::uint64_t{0});
    const json specs = j.value("specs", json::array({json::object()}));
    if (!specs.is_array()) throw ConfigError("specs must be an array");
    for (const auto& s : specs) {
      if (c.kind == ExperimentKind::kJoinSize) {
        c.join_specs.push_back(ParseJoinSizeSpec(s));
      } else {
        SyntheticSpec spec = ParseSyntheticSpec(s);
        if (c.kind == ExperimentKind::kBinary) spec.binary = true;
        if (c.kind == ExperimentKind::kCorrelation) {
          if (!spec.target_correlation) spec.target_correlation = 0.0;
          if (spec.outlier_fraction > 0.0 && !s.contains("outlier_fraction")) {
            spec.outlier_fraction = 0.0;
          }
        }
        c.specs.push_back(spec);
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

unsigned HarnessThreads() {
  if (const char* env = std::getenv("IPSKETCH_THREADS")) {
    unsigned n = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec == std::errc() && ptr == end && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct TrialData {
  SparseVector a;
  SparseVector b;
  double truth = 0.0;
  double scale = 1.0;  // ||a|| ||b||, or 1 for correlation
  double overlap = 0.0;
};

TrialData MakeTrialData(const ExperimentConfig& c, std::size_t spec,
                        std::uint64_t data_seed) {
  TrialData d;
  if (c.kind == ExperimentKind::kJoinSize) {
    JoinSizeSpec js = c.join_specs[spec];
    js.seed = data_seed;
    std::tie(d.a, d.b) = GenZipfJoinPair(js);
  } else {
    SyntheticSpec s = c.specs[spec];
    s.seed = data_seed;
    d.overlap = s.overlap_fraction;
    std::tie(d.a, d.b) = c.kind == ExperimentKind::kCorrelation ? GenCorrelatedPair(s)
                                                               : GenPair(s);
  }
  if (c.kind == ExperimentKind::kCorrelation) {
    const auto [x, y] = JoinColumns(d.a, d.b);
    const CorrelationResult r = PearsonCorrelation(x, y);
    if (!r.rho) throw ConfigError("generated pair has undefined correlation");
    d.truth = *r.rho;
  } else {
    d.truth = ExactInnerProduct(d.a, d.b);
    d.scale = std::sqrt(ComputeNorms(d.a).l2_squared * ComputeNorms(d.b).l2_squared);
  }
  return d;
}

}  // namespace

std::vector<ResultRow> RunExperiment(const ExperimentConfig& c) {
  const std::size_t n_specs =
      c.kind == ExperimentKind::kJoinSize ? c.join_specs.size() : c.specs.size();
  const std::size_t per_item = c.methods.size() * c.budgets.size();
  const std::size_t n_items = n_specs * c.trials;
  std::vector<std::vector<ResultRow>> items(n_items);
  if (per_item == 0) return {};

  auto run_item = [&](std::size_t item) {
    const std::size_t spec = item / c.trials;
    const std::uint64_t trial = item % c.trials;
    const std::uint64_t data_seed = DeriveSeed(HashCombine(c.seed, 2 * spec), trial);
    const std::uint64_t sketch_seed = DeriveSeed(HashCombine(c.seed, 2 * spec + 1), trial);
    const TrialData d = MakeTrialData(c, spec, data_seed);
    std::vector<ResultRow>& rows = items[item];
    rows.reserve(per_item);
    for (BenchMethod method : c.methods) {
      for (double words : c.budgets) {
        const MethodOutcome o =
            c.kind == ExperimentKind::kCorrelation
                ? RunCorrelationMethod(method, d.a, d.b, words, sketch_seed)
                : RunInnerProductMethod(method, d.a, d.b, words, sketch_seed);
        ResultRow r;
        r.method = std::string(BenchMethodTag(method));
        r.spec = spec;
        r.overlap = d.overlap;
        r.storage_words = words;
        r.trial = trial;
        r.seed = sketch_seed;
        r.estimate = o.estimate;
        r.truth = d.truth;
        if (o.estimate) r.normalized_error = std::abs(*o.estimate - d.truth) / d.scale;
        r.sketch_size = o.sketch_size;
        r.seconds_sketch = o.seconds_sketch;
        r.seconds_estimate = o.seconds_estimate;
        rows.push_back(std::move(r));
      }
    }
  };

  const unsigned threads = std::min<std::size_t>(HarnessThreads(), n_items);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t item = next++; item < n_items; item = next++) {
      try {
        run_item(item);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_items;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> out;
  out.reserve(n_items * per_item);
  for (std::size_t spec = 0; spec < n_specs; ++spec) {
    for (std::size_t k = 0; k < per_item; ++k) {
      for (std::uint64_t trial = 0; trial < c.trials; ++trial) {
        out.push_back(items[spec * c.trials + trial][k]);
      }
    }
  }
  return out;
}

std::vector<SummaryRow> Summarize(std::span<const ResultRow> rows) {
  std::vector<SummaryRow> out;
  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin;
    while (end < rows.size() && rows[end].spec == rows[begin].spec &&
           rows[end].method == rows[begin].method &&
           rows[end].storage_words == rows[begin].storage_words) {
      ++end;
    }
    SummaryRow s;
    s.method = rows[begin].method;
    s.spec = rows[begin].spec;
    s.overlap = rows[begin].overlap;
    s.storage_words = rows[begin].storage_words;
    s.trials = end - begin;
    double err = 0.0, size = 0.0, truth_sum = 0.0;
    std::uint64_t defined = 0;
    for (std::size_t k = begin; k < end; ++k) {
      size += rows[k].sketch_size;
      if (!rows[k].estimate) continue;
      ++defined;
      err += *rows[k].normalized_error;
      truth_sum += rows[k].truth;
    }
    s.undefined = s.trials - defined;
    s.mean_sketch_size = size / static_cast<double>(s.trials);
    s.mean_error = defined ? err / static_cast<double>(defined) : std::nan("");
    const double truth_mean = defined ? truth_sum / static_cast<double>(defined) : 0.0;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      if (!rows[k].estimate) continue;
      ss_res += (*rows[k].estimate - rows[k].truth) * (*rows[k].estimate - rows[k].truth);
      ss_tot += (rows[k].truth - truth_mean) * (rows[k].truth - truth_mean);
    }
    s.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : std::nan("");
    out.push_back(std::move(s));
    begin = end;
  }
  return out;
}

namespace {

std::string Num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string Num(const std::optional<double>& x) { return x ? Num(*x) : "nan"; }

}  // namespace

void WriteResultsCsv(std::ostream& out, std::span<const ResultRow> rows,
                     bool include_timing) {
  out << "method,spec,overlap,storage_words,trial,seed,estimate,truth,"
         "normalized_error,sketch_size";
  if (include_timing) out << ",seconds_sketch,seconds_estimate";
  out << '\n';
  for (const ResultRow& r : rows) {
    out << r.method << ',' << r.spec << ',' << Num(r.overlap) << ','
        << Num(r.storage_words) << ',' << r.trial << ',' << r.seed << ','
        << Num(r.estimate) << ',' << Num(r.truth) << ',' << Num(r.normalized_error)
        << ',' << Num(r.sketch_size);
    if (include_timing) {
      out << ',' << Num(r.seconds_sketch) << ',' << Num(r.seconds_estimate);
    }
    out << '\n';
  }
}

void WriteSummaryCsv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "method,spec,overlap,storage_words,trials,undefined,mean_error,"
         "r_squared,mean_sketch_size\n";
  for (const SummaryRow& s : rows) {
    out << s.method << ',' << s.spec << ',' << Num(s.overlap) << ','
        << Num(s.storage_words) << ',' << s.trials << ',' << s.undefined << ','
        << Num(s.mean_error) << ',' << Num(s.r_squared) << ','
        << Num(s.mean_sketch_size) << '\n';
  }
}

void RunGrid(const std::filesystem::path& config_path,
             const std::filesystem::path& results_path,
             const std::filesystem::path& summary_path, bool include_timing) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config " + config_path.string());
  std::stringstream text;
  text << in.rdbuf();
  const ExperimentConfig config = ParseExperimentConfig(text.str());
  const std::vector<ResultRow> rows = RunExperiment(config);
  std::ofstream results(results_path);
  if (!results) throw Error("cannot write " + results_path.string());
  WriteResultsCsv(results, rows, include_timing);
  std::ofstream summary(summary_path);
  if (!summary) throw Error("cannot write " + summary_path.string());
  WriteSummaryCsv(summary, Summarize(rows));
}

}  // namespace ipsketch
