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

#include "ipsketch/join_correlation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ipsketch/error.h"
#include "ipsketch/estimator.h"
#include "ipsketch/hashing.h"
#include "ipsketch/sampling_variants.h"
#include "ipsketch/threshold_sketch.h"

namespace ipsketch {

CorrelationResult CorrelationFormula(const JoinInnerProducts& ip,
                                     double tolerance) {
  if (!(ip.n > 0)) {
    throw NoOverlapError("join is empty: estimated join size is " +
                         std::to_string(ip.n));
  }
  CorrelationResult r;
  const double var_x = ip.n * ip.sum_x2 - ip.sum_x * ip.sum_x;
  const double var_y = ip.n * ip.sum_y2 - ip.sum_y * ip.sum_y;
  if (!(var_x > tolerance * std::abs(ip.n * ip.sum_x2))) {
    r.diagnostic = "variance of x is not positive (" + std::to_string(var_x) + ")";
    return r;
  }
  if (!(var_y > tolerance * std::abs(ip.n * ip.sum_y2))) {
    r.diagnostic = "variance of y is not positive (" + std::to_string(var_y) + ")";
    return r;
  }
  const double rho =
      (ip.n * ip.ip_xy - ip.sum_x * ip.sum_y) / (std::sqrt(var_x) * std::sqrt(var_y));
  r.rho = std::clamp(rho, -1.0, 1.0);
  return r;
}

JoinInnerProducts ExactJoinInnerProducts(const SparseVector& a,
                                         const SparseVector& b) {
  const DerivedTriple ta = DeriveTriple(a);
  const DerivedTriple tb = DeriveTriple(b);
  return {ExactInnerProduct(ta.indicator, tb.indicator),
          ExactInnerProduct(ta.base, tb.indicator),
          ExactInnerProduct(ta.indicator, tb.base),
          ExactInnerProduct(ta.base, tb.base),
          ExactInnerProduct(ta.squared, tb.indicator),
          ExactInnerProduct(ta.indicator, tb.squared)};
}

double CorrelationSketch::InclusionProbability(std::size_t j) const {
  const double v2 = values[j] * values[j];
  return std::min(1.0, std::max({tau_indicator, v2 * tau_base, v2 * v2 * tau_squared}));
}

namespace {

struct ViewNorms {
  double count = 0.0;  // ||1_a||^2
  double l2 = 0.0;     // ||a||^2
  double l4 = 0.0;     // ||a^2||^2
};

ViewNorms ComputeViewNorms(const SparseVector& a) {
  ViewNorms n;
  for (const Entry& e : a.entries()) {
    const double v2 = e.value * e.value;
    n.count += 1.0;
    n.l2 += v2;
    n.l4 += v2 * v2;
  }
  return n;
}

CorrelationSketch EmptyCorrelationSketch(const SparseVector& a, Family family,
                                         std::uint64_t seed,
                                         std::uint64_t budget) {
  if (budget < 3) {
    throw ContractError("correlation sketch budget must be >= 3");
  }
  CorrelationSketch s;
  s.family = family;
  s.budget = budget;
  s.seed = seed;
  s.universe_size = a.universe_size();
  return s;
}

void CheckHashes(const SparseVector& a, std::span<const double> hashes) {
  if (hashes.size() != a.nnz()) {
    throw ContractError("one hash value per nonzero required");
  }
}

}  // namespace

std::vector<double> GlobalThresholdWeights(const SparseVector& a) {
  const ViewNorms norms = ComputeViewNorms(a);
  std::vector<double> q;
  q.reserve(a.nnz());
  for (const Entry& e : a.entries()) {
    const double v2 = e.value * e.value;
    q.push_back(std::max({1.0 / norms.count, v2 / norms.l2, v2 * v2 / norms.l4}));
  }
  return q;
}

CorrelationSketch CorrelationThresholdSketchWithHashes(
    const SparseVector& a, std::span<const double> hashes, std::uint64_t seed,
    std::uint64_t budget) {
  CheckHashes(a, hashes);
  CorrelationSketch s = EmptyCorrelationSketch(a, Family::kThreshold, seed, budget);
  if (a.empty()) return s;

  const ViewNorms norms = ComputeViewNorms(a);
  const std::vector<double> q = GlobalThresholdWeights(a);
  const double m = static_cast<double>(budget);
  s.m_prime = SolveSaturatingBudget(q, m, m / 3.0).m_prime;
  s.tau_indicator = s.m_prime / norms.count;
  s.tau_base = s.m_prime / norms.l2;
  s.tau_squared = s.m_prime / norms.l4;

  const auto entries = a.entries();
  for (std::size_t j = 0; j < entries.size(); ++j) {
    if (hashes[j] <= s.m_prime * q[j]) {
      s.keys.push_back(entries[j].index);
      s.values.push_back(entries[j].value);
    }
  }
  return s;
}

CorrelationSketch CorrelationThresholdSketch(const SparseVector& a,
                                             std::uint64_t seed,
                                             std::uint64_t budget) {
  return CorrelationThresholdSketchWithHashes(
      a, HashSupport(a, UniformHasher(seed)), seed, budget);
}

CorrelationSketch CorrelationPrioritySketchWithHashes(
    const SparseVector& a, std::span<const double> hashes, std::uint64_t seed,
    std::uint64_t budget) {
  CheckHashes(a, hashes);
  CorrelationSketch s = EmptyCorrelationSketch(a, Family::kPriority, seed, budget);
  const auto entries = a.entries();
  const std::size_t n = entries.size();
  if (n <= budget) {
    s.keys.reserve(n);
    for (const Entry& e : entries) {
      s.keys.push_back(e.index);
      s.values.push_back(e.value);
    }
    s.view_counts = {n, n, n};
    s.m_prime = static_cast<double>(n);
    return s;
  }

  // View order: indicator h, base h/a^2, squared h/a^4.
  std::array<std::vector<double>, 3> ranks;
  for (auto& r : ranks) r.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double v2 = entries[j].value * entries[j].value;
    ranks[0][j] = hashes[j];
    ranks[1][j] = hashes[j] / v2;
    ranks[2][j] = hashes[j] / (v2 * v2);
  }
  std::array<std::vector<std::size_t>, 3> order;
  for (int f = 0; f < 3; ++f) {
    order[f].resize(n);
    std::iota(order[f].begin(), order[f].end(), std::size_t{0});
    const auto& r = ranks[f];
    std::sort(order[f].begin(), order[f].end(), [&r](std::size_t x, std::size_t y) {
      return r[x] != r[y] ? r[x] < r[y] : x < y;
    });
  }

  // Step s raises one view count by one, round robin base -> indicator ->
  // squared, so the kept set grows by at most one index per step.
  auto counts_at = [](std::uint64_t step) {
    return std::array<std::uint64_t, 3>{(step + 1) / 3, (step + 2) / 3, step / 3};
  };
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t generation = 0;
  auto kept_size = [&](const std::array<std::uint64_t, 3>& counts) {
    ++generation;
    std::size_t size = 0;
    for (int f = 0; f < 3; ++f) {
      const std::size_t limit = std::min<std::size_t>(counts[f], n);
      for (std::size_t k = 0; k < limit; ++k) {
        const std::size_t j = order[f][k];
        if (stamp[j] != generation) {
          stamp[j] = generation;
          ++size;
        }
      }
    }
    return size;
  };

  // size(budget) <= budget and size(3 budget) >= budget since budget < n.
  std::uint64_t lo = budget, hi = 3 * budget;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (kept_size(counts_at(mid)) >= budget) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  s.view_counts = counts_at(lo);

  ++generation;
  std::vector<std::size_t> kept;
  kept.reserve(budget);
  std::array<double, 3> tau{};
  for (int f = 0; f < 3; ++f) {
    const std::size_t count = s.view_counts[f];
    tau[f] = count < n ? ranks[f][order[f][count]] : kInfinity;
    for (std::size_t k = 0; k < std::min<std::size_t>(count, n); ++k) {
      const std::size_t j = order[f][k];
      if (stamp[j] != generation) {
        stamp[j] = generation;
        kept.push_back(j);
      }
    }
  }
  std::sort(kept.begin(), kept.end());
  s.tau_indicator = tau[0];
  s.tau_base = tau[1];
  s.tau_squared = tau[2];
  s.m_prime = static_cast<double>(s.view_counts[0] + s.view_counts[1] +
                                  s.view_counts[2]) / 3.0;
  s.keys.reserve(kept.size());
  s.values.reserve(kept.size());
  for (std::size_t j : kept) {
    s.keys.push_back(entries[j].index);
    s.values.push_back(entries[j].value);
  }
  return s;
}

CorrelationSketch CorrelationPrioritySketch(const SparseVector& a,
                                            std::uint64_t seed,
                                            std::uint64_t budget) {
  return CorrelationPrioritySketchWithHashes(
      a, HashSupport(a, UniformHasher(seed)), seed, budget);
}

JoinInnerProducts EstimateJoinInnerProducts(const CorrelationSketch& ga,
                                            const CorrelationSketch& gb) {
  if (ga.seed != gb.seed) {
    throw ContractError("correlation sketches were built with different seeds");
  }
  if (ga.universe_size != gb.universe_size) {
    throw DimensionError("correlation sketches cover different universes");
  }
  JoinInnerProducts out;
  std::size_t i = 0, j = 0;
  while (i < ga.size() && j < gb.size()) {
    if (ga.keys[i] < gb.keys[j]) {
      ++i;
    } else if (gb.keys[j] < ga.keys[i]) {
      ++j;
    } else {
      const double p = std::max(
          std::min(ga.InclusionProbability(i), gb.InclusionProbability(j)),
          std::numeric_limits<double>::min());
      const double x = ga.values[i];
      const double y = gb.values[j];
      out.n += 1.0 / p;
      out.sum_x += x / p;
      out.sum_y += y / p;
      out.ip_xy += x * y / p;
      out.sum_x2 += x * x / p;
      out.sum_y2 += y * y / p;
      ++i;
      ++j;
    }
  }
  return out;
}

CorrelationResult EstimateJoinCorrelation(const CorrelationSketch& ga,
                                          const CorrelationSketch& gb) {
  return CorrelationFormula(EstimateJoinInnerProducts(ga, gb));
}

TripleSampleSketch MakeTripleSampleSketch(const SparseVector& a,
                                          std::uint64_t seed,
                                          std::uint64_t budget, Method method) {
  const std::uint64_t per_view = budget / 3;
  if (per_view == 0) throw ContractError("triple sketch budget must be >= 3");
  const DerivedTriple t = DeriveTriple(a);
  return {VariantSketch(t.base, seed, per_view, method),
          VariantSketch(t.squared, seed, per_view, method),
          VariantSketch(t.indicator, seed, per_view, method)};
}

JoinInnerProducts EstimateJoinInnerProducts(const TripleSampleSketch& ta,
                                            const TripleSampleSketch& tb) {
  auto est = [](const SampleSketch& x, const SampleSketch& y) {
    return EstimateInnerProduct(x, y).estimate;
  };
  return {est(ta.indicator, tb.indicator), est(ta.base, tb.indicator),
          est(ta.indicator, tb.base),      est(ta.base, tb.base),
          est(ta.squared, tb.indicator),   est(ta.indicator, tb.squared)};
}

TripleLinearSketch MakeTripleLinearSketch(const SparseVector& a,
                                          std::uint64_t seed,
                                          std::uint64_t words, LinearKind kind) {
  const std::uint64_t per_view = words / 3;
  if (per_view == 0) throw ContractError("triple sketch budget must be >= 3");
  const DerivedTriple t = DeriveTriple(a);
  return {MakeLinearSketch(kind, t.base, seed, per_view),
          MakeLinearSketch(kind, t.squared, seed, per_view),
          MakeLinearSketch(kind, t.indicator, seed, per_view)};
}

JoinInnerProducts EstimateJoinInnerProducts(const TripleLinearSketch& ta,
                                            const TripleLinearSketch& tb) {
  return {LinearEstimate(ta.indicator, tb.indicator),
          LinearEstimate(ta.base, tb.indicator),
          LinearEstimate(ta.indicator, tb.base),
          LinearEstimate(ta.base, tb.base),
          LinearEstimate(ta.squared, tb.indicator),
          LinearEstimate(ta.indicator, tb.squared)};
}

CorrelationResult PearsonCorrelation(std::span<const double> x,
                                     std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("columns differ in length");
  if (x.empty()) throw NoOverlapError("join is empty");
  CorrelationResult r;
  if (x.size() < 2) {
    r.diagnostic = "fewer than two joined rows";
    return r;
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0) || !(syy > 0)) {
    r.diagnostic = "constant column";
    return r;
  }
  r.rho = std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
  return r;
}

std::pair<std::vector<double>, std::vector<double>> JoinColumns(
    const SparseVector& a, const SparseVector& b) {
  if (a.universe_size() != b.universe_size()) {
    throw DimensionError("universe sizes differ");
  }
  std::pair<std::vector<double>, std::vector<double>> out;
  auto ea = a.entries();
  auto eb = b.entries();
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].index < eb[j].index) {
      ++i;
    } else if (eb[j].index < ea[i].index) {
      ++j;
    } else {
      out.first.push_back(ea[i].value);
      out.second.push_back(eb[j].value);
      ++i;
      ++j;
    }
  }
  return out;
}

CorrelationResult SampledPairsCorrelation(const SampleSketch& sa,
                                          const SampleSketch& sb) {
  CheckCompatible(sa, sb);
  std::vector<double> x, y;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa.keys[i] < sb.keys[j]) {
      ++i;
    } else if (sb.keys[j] < sa.keys[i]) {
      ++j;
    } else {
      x.push_back(sa.values[i]);
      y.push_back(sb.values[j]);
      ++i;
      ++j;
    }
  }
  return PearsonCorrelation(x, y);
}

}  // namespace ipsketch
