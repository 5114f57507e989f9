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

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "fixtures.h"
#include "ipsketch/error.h"
#include "ipsketch/sampling_variants.h"
#include "ipsketch/serialization.h"

namespace ipsketch {
namespace {

TEST_CASE("sample sketches round trip through both encodings") {
  const SparseVector a = testing::RandomVector(1, 10000, 500);
  for (Method method : {Method::kThresholdL2, Method::kPriorityL2, Method::kThresholdL1,
                        Method::kPriorityL1, Method::kThresholdUniform,
                        Method::kPriorityUniform}) {
    const SampleSketch s = VariantSketch(a, 0xdeadbeefcafef00dULL, 40, method);
    const std::string bytes = EncodeBinary(s);
    CHECK(PeekRecordKind(bytes) == RecordKind::kSample);
    CHECK(DecodeSampleSketch(bytes) == s);
    const std::string text = EncodeJson(s);
    CHECK(PeekJsonRecordKind(text) == RecordKind::kSample);
    CHECK(DecodeSampleSketchJson(text) == s);
  }
}

TEST_CASE("binary layout") {
  SampleSketch s;
  s.method = Method::kPriorityL2;
  s.m = 2;
  s.seed = 5;
  s.universe_size = 100;
  s.tau = 0.5;
  s.keys = {3, 9};
  s.values = {1.0, -2.0};
  const std::string bytes = EncodeBinary(s);
  CHECK(bytes.size() == 4 + 2 + 1 + 1 + 3 * 8 + 8 + 8 + 1 + 8 + 8 + 2 * 16);
  CHECK(bytes.substr(0, 4) == "IPSK");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);
  CHECK(bytes[7] == 2);
  CHECK(bytes[8] == 2);  // m, little-endian
}

TEST_CASE("infinite tau survives both encodings") {
  const SampleSketch s = VariantSketch(testing::ExampleA(), 1, 10, Method::kPriorityL2);
  REQUIRE(std::isinf(s.tau));
  CHECK(std::isinf(DecodeSampleSketch(EncodeBinary(s)).tau));
  const std::string text = EncodeJson(s);
  CHECK(text.find("\"inf\"") != std::string::npos);
  CHECK(DecodeSampleSketchJson(text) == s);
}

TEST_CASE("linear and correlation sketches round trip") {
  const SparseVector a = testing::RandomVector(2, 1000, 100);
  for (LinearKind kind : {LinearKind::kJl, LinearKind::kCountSketch}) {
    const LinearSketch s = MakeLinearSketch(kind, a, 3, 17);
    CHECK(DecodeLinearSketch(EncodeBinary(s)) == s);
    CHECK(DecodeLinearSketchJson(EncodeJson(s)) == s);
  }
  for (const CorrelationSketch& g :
       {CorrelationThresholdSketch(a, 4, 30), CorrelationPrioritySketch(a, 4, 30),
        CorrelationPrioritySketch(a, 4, 300)}) {
    CHECK(DecodeCorrelationSketch(EncodeBinary(g)) == g);
    CHECK(DecodeCorrelationSketchJson(EncodeJson(g)) == g);
  }
}

TEST_CASE("malformed records are rejected") {
  const SampleSketch s = VariantSketch(testing::ExampleA(), 1, 3, Method::kPriorityL2);
  const std::string bytes = EncodeBinary(s);
  CHECK_THROWS_AS(DecodeSampleSketch(bytes.substr(0, bytes.size() - 1)), FormatError);
  CHECK_THROWS_AS(DecodeSampleSketch(bytes + "x"), FormatError);
  CHECK_THROWS_AS(DecodeSampleSketch("JUNK" + bytes.substr(4)), FormatError);
  CHECK_THROWS_AS(DecodeLinearSketch(bytes), FormatError);
  std::string version = bytes;
  version[4] = 9;
  CHECK_THROWS_AS(DecodeSampleSketch(version), FormatError);
  std::string method = bytes;
  method[7] = 42;
  CHECK_THROWS_AS(DecodeSampleSketch(method), FormatError);
  SampleSketch unsorted = s;
  std::swap(unsorted.keys[0], unsorted.keys[1]);
  CHECK_THROWS_AS(DecodeSampleSketch(EncodeBinary(unsorted)), FormatError);
  CHECK_THROWS_AS(DecodeSampleSketchJson("{"), FormatError);
  CHECK_THROWS_AS(DecodeSampleSketchJson(EncodeJson(CorrelationPrioritySketch(testing::ExampleA(), 1, 3))),
                  FormatError);
}

TEST_CASE("files") {
  const auto path = std::filesystem::temp_directory_path() / "ipsketch_serialization_test.bin";
  const SampleSketch s = VariantSketch(testing::ExampleB(), 9, 3, Method::kThresholdL2);
  WriteFileBytes(path, EncodeBinary(s));
  CHECK(DecodeSampleSketch(ReadFileBytes(path)) == s);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ReadFileBytes(path), Error);
}

}  // namespace
}  // namespace ipsketch
