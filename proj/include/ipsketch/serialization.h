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

#ifndef IPSKETCH_SERIALIZATION_H_
#define IPSKETCH_SERIALIZATION_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ipsketch/baselines.h"
#include "ipsketch/join_correlation.h"
#include "ipsketch/sample_sketch.h"

namespace ipsketch {

// Binary envelope, all integers and doubles little-endian:
//
//   "IPSK"  u16 format_version  u8 record_kind  u8 tag
//   u64 m   u64 seed            u64 universe_size
//   payload
//
// record_kind 1 (sample), tag = Method wire value:
//   f64 tau, f64 m_prime, u8 has_aux, f64 aux, u64 count,
//   count x (u64 index, f64 value)
// record_kind 2 (linear), tag = LinearKind:
//   u64 count, count x f64 coordinate
// record_kind 3 (correlation), tag = Family, m = budget:
//   f64 tau_indicator, f64 tau_base, f64 tau_squared, f64 m_prime,
//   3 x u64 view_counts, u64 count, count x (u64 index, f64 value)
inline constexpr std::uint16_t kFormatVersion = 1;

enum class RecordKind : std::uint8_t {
  kSample = 1,
  kLinear = 2,
  kCorrelation = 3,
};

std::string EncodeBinary(const SampleSketch& sketch);
std::string EncodeBinary(const LinearSketch& sketch);
std::string EncodeBinary(const CorrelationSketch& sketch);

// Throws FormatError on a bad magic, unknown version, wrong record kind,
// truncated data or keys that are not strictly increasing.
RecordKind PeekRecordKind(std::string_view bytes);
SampleSketch DecodeSampleSketch(std::string_view bytes);
LinearSketch DecodeLinearSketch(std::string_view bytes);
CorrelationSketch DecodeCorrelationSketch(std::string_view bytes);

// JSON mirror of the binary records. Infinite tau is written as "inf".
std::string EncodeJson(const SampleSketch& sketch);
std::string EncodeJson(const LinearSketch& sketch);
std::string EncodeJson(const CorrelationSketch& sketch);

RecordKind PeekJsonRecordKind(std::string_view text);
SampleSketch DecodeSampleSketchJson(std::string_view text);
LinearSketch DecodeLinearSketchJson(std::string_view text);
CorrelationSketch DecodeCorrelationSketchJson(std::string_view text);

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace ipsketch

#endif  // IPSKETCH_SERIALIZATION_H_
