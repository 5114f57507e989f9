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

#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.h"
#include "ipsketch/error.h"
#include "ipsketch/sparse_vector.h"

namespace ipsketch {
namespace {

using testing::ExampleA;
using testing::ExampleB;

TEST_CASE("construction sorts and validates") {
  SparseVector v(10, {{7, 1.0}, {2, -3.0}, {5, 0.5}});
  REQUIRE(v.nnz() == 3);
  CHECK(v.entries()[0].index == 2);
  CHECK(v.entries()[2].index == 7);
  CHECK(v.value(5) == 0.5);
  CHECK(v.value(4) == 0.0);
  CHECK(v.contains(7));
  CHECK_FALSE(v.contains(8));

  CHECK_THROWS_AS(SparseVector(10, {{1, 1.0}, {1, 2.0}}), ContractError);
  CHECK_THROWS_AS(SparseVector(10, {{1, 0.0}}), ContractError);
  CHECK_THROWS_AS(SparseVector(10, {{10, 1.0}}), ContractError);
  CHECK_THROWS_AS(SparseVector(10, {{3, std::nan("")}}), ContractError);
  CHECK_THROWS_AS(SparseVector(0, {}), ContractError);
}

TEST_CASE("dense round trip drops zeros") {
  const std::vector<double> dense = {0, 1.5, 0, -2, 0};
  const SparseVector v = SparseVector::FromDense(dense);
  CHECK(v.universe_size() == 5);
  CHECK(v.nnz() == 2);
  CHECK(v.ToDense() == dense);
}

TEST_CASE("inner product of the worked example") {
  CHECK(ExactInnerProduct(ExampleA(), ExampleB()) == doctest::Approx(-31.85).epsilon(1e-12));
  CHECK(ExactInnerProduct(ExampleA(), SparseVector(17, {})) == 0.0);
}

TEST_CASE("inner product agrees with a dense loop") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SparseVector a = testing::RandomVector(seed, 20, 12);
    const SparseVector b = testing::RandomVector(seed + 100, 20, 9);
    const auto da = a.ToDense();
    const auto db = b.ToDense();
    double dot = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) dot += da[i] * db[i];
    CHECK(ExactInnerProduct(a, b) == doctest::Approx(dot).epsilon(1e-14));
    CHECK(ExactInnerProduct(a, b) == ExactInnerProduct(b, a));
  }
}

TEST_CASE("inner product rejects mismatched universes") {
  CHECK_THROWS_AS(ExactInnerProduct(SparseVector(5, {}), SparseVector(6, {})),
                  DimensionError);
}

TEST_CASE("norms") {
  const Norms na = ComputeNorms(ExampleA());
  CHECK(na.l2_squared == doctest::Approx(50.48).epsilon(1e-13));
  CHECK(na.l1 == doctest::Approx(16.0).epsilon(1e-13));
  CHECK(ComputeNorms(ExampleB()).l2_squared == doctest::Approx(72.23).epsilon(1e-13));
  const Norms empty = ComputeNorms(SparseVector(4, {}));
  CHECK(empty.l1 == 0.0);
  CHECK(empty.l2_squared == 0.0);
}

TEST_CASE("derived triple") {
  const DerivedTriple t = DeriveTriple(ExampleA());
  CHECK(t.squared.value(3) == doctest::Approx(6.25));
  CHECK(t.squared.value(11) == doctest::Approx(0.25));
  CHECK(t.squared.value(16) == doctest::Approx(13.69));
  REQUIRE(t.indicator.nnz() == 6);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(t.indicator.entries()[j].value == 1.0);
    CHECK(t.indicator.entries()[j].index == t.base.entries()[j].index);
    CHECK(t.squared.entries()[j].index == t.base.entries()[j].index);
  }
  const DerivedTriple e = DeriveTriple(SparseVector(3, {}));
  CHECK(e.base.empty());
  CHECK(e.squared.empty());
  CHECK(e.indicator.empty());
}

TEST_CASE("indicator and restricted norm identities") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SparseVector a = testing::RandomVector(seed, 50, 20);
    const SparseVector b = testing::RandomVector(seed + 7, 50, 25);
    const DerivedTriple ta = DeriveTriple(a);
    const DerivedTriple tb = DeriveTriple(b);
    CHECK(ExactInnerProduct(ta.indicator, tb.indicator) ==
          static_cast<double>(OverlapSize(a, b)));
    CHECK(ExactInnerProduct(ta.squared, tb.indicator) ==
          doctest::Approx(RestrictedL2Squared(a, b)).epsilon(1e-14));
  }
}

TEST_CASE("key/value ingestion aggregates repeated keys") {
  std::istringstream in("key,value\nx,1.5\ny,2\nx,2.5\nz,1\nz,-1\n");
  const SparseVector v = IngestKeyValueCsv(in);
  CHECK(v.nnz() == 2);
  CHECK(v.value(StableKeyHash("x")) == 4.0);
  CHECK(v.value(StableKeyHash("y")) == 2.0);
  CHECK_FALSE(v.contains(StableKeyHash("z")));

  std::istringstream bad("a,1\nb,not-a-number\n");
  CHECK_THROWS_AS(IngestKeyValueCsv(bad), FormatError);
}

TEST_CASE("stable key hash is fixed") {
  // FNV-1a 64 followed by the splitmix64 finalizer, computed independently.
  // Pinned so that sketch files stay valid across builds.
  CHECK(StableKeyHash("") == 17665956581633026203ULL);
  CHECK(StableKeyHash("alpha") == 8596495612706370024ULL);
  CHECK(StableKeyHash("apple") == 13442815656432221361ULL);
}

TEST_CASE("key frequency vector") {
  const std::vector<std::string> keys = {"k", "k", "k", "m"};
  const SparseVector v = KeyFrequencyVector(keys, 1000);
  CHECK(v.nnz() == 2);
  CHECK(v.value(StableKeyHash("k") % 1000) == 3.0);
}

}  // namespace
}  // namespace ipsketch
