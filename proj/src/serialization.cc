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

#include "ipsketch/serialization.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "ipsketch/error.h"
#include "json.hpp"

namespace ipsketch {

namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "IPSK";

class Writer {
 public:
  void U8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void U16(std::uint16_t v) {
    for (int k = 0; k < 2; ++k) U8(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void U64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) U8(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Raw(std::string_view s) { out_.append(s); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t U8() {
    Need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint16_t U16() {
    std::uint16_t v = U8();
    return static_cast<std::uint16_t>(v | (U8() << 8));
  }
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) {
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(in_[pos_++])) << (8 * k);
    }
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string_view Raw(std::size_t n) {
    Need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  // Guards element counts before allocating.
  void NeedItems(std::uint64_t count, std::size_t item_bytes) {
    if (count > (in_.size() - pos_) / item_bytes) {
      throw FormatError("truncated record: " + std::to_string(count) +
                        " items declared");
    }
  }
  void Finish() const {
    if (pos_ != in_.size()) throw FormatError("trailing bytes after record");
  }

 private:
  void Need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("truncated record");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

struct Header {
  RecordKind kind;
  std::uint8_t tag;
  std::uint64_t m;
  std::uint64_t seed;
  std::uint64_t universe_size;
};

void WriteHeader(Writer& w, RecordKind kind, std::uint8_t tag, std::uint64_t m,
                 std::uint64_t seed, std::uint64_t universe_size) {
  w.Raw(kMagic);
  w.U16(kFormatVersion);
  w.U8(static_cast<std::uint8_t>(kind));
  w.U8(tag);
  w.U64(m);
  w.U64(seed);
  w.U64(universe_size);
}

Header ReadHeader(Reader& r) {
  if (r.Raw(4) != kMagic) throw FormatError("not an ipsketch record (bad magic)");
  const std::uint16_t version = r.U16();
  if (version != kFormatVersion) {
    throw FormatError("unsupported format version " + std::to_string(version));
  }
  Header h;
  const std::uint8_t kind = r.U8();
  if (kind < 1 || kind > 3) {
    throw FormatError("unknown record kind " + std::to_string(kind));
  }
  h.kind = static_cast<RecordKind>(kind);
  h.tag = r.U8();
  h.m = r.U64();
  h.seed = r.U64();
  h.universe_size = r.U64();
  if (h.universe_size == 0) throw FormatError("universe size is zero");
  return h;
}

void ExpectKind(const Header& h, RecordKind kind) {
  if (h.kind != kind) {
    throw FormatError("record kind " + std::to_string(static_cast<int>(h.kind)) +
                      ", expected " + std::to_string(static_cast<int>(kind)));
  }
}

Method MethodFromWire(std::uint8_t tag) {
  if (tag < 1 || tag > 6) throw FormatError("unknown method tag " + std::to_string(tag));
  return static_cast<Method>(tag);
}

LinearKind LinearKindFromWire(std::uint8_t tag) {
  if (tag < 1 || tag > 2) throw FormatError("unknown linear kind " + std::to_string(tag));
  return static_cast<LinearKind>(tag);
}

Family FamilyFromWire(std::uint8_t tag) {
  if (tag > 1) throw FormatError("unknown family " + std::to_string(tag));
  return static_cast<Family>(tag);
}

void WritePairs(Writer& w, const std::vector<Index>& keys,
                const std::vector<double>& values) {
  w.U64(keys.size());
  for (std::size_t j = 0; j < keys.size(); ++j) {
    w.U64(keys[j]);
    w.F64(values[j]);
  }
}

void CheckKeys(const std::vector<Index>& keys, Index universe_size) {
  for (std::size_t j = 0; j < keys.size(); ++j) {
    if (keys[j] >= universe_size) throw FormatError("key outside the universe");
    if (j > 0 && keys[j] <= keys[j - 1]) {
      throw FormatError("keys are not strictly increasing");
    }
  }
}

void ReadPairs(Reader& r, Index universe_size, std::vector<Index>& keys,
               std::vector<double>& values) {
  const std::uint64_t count = r.U64();
  r.NeedItems(count, 16);
  keys.resize(count);
  values.resize(count);
  for (std::uint64_t j = 0; j < count; ++j) {
    keys[j] = r.U64();
    values[j] = r.F64();
  }
  CheckKeys(keys, universe_size);
}

json DoubleToJson(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double DoubleFromJson(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    throw FormatError("bad number '" + s + "'");
  }
  return j.get<double>();
}

json ParseJson(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

template <class Fn>
auto Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed sketch JSON: ") + e.what());
  }
}

std::string_view KindName(RecordKind kind) {
  switch (kind) {
    case RecordKind::kSample:
      return "sample";
    case RecordKind::kLinear:
      return "linear";
    case RecordKind::kCorrelation:
      return "correlation";
  }
  return "";
}

json CheckedJson(std::string_view text, RecordKind kind) {
  json j = ParseJson(text);
  Guard([&] {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw FormatError("unsupported format version");
    }
    if (j.at("kind").get<std::string>() != KindName(kind)) {
      throw FormatError("record kind is '" + j.at("kind").get<std::string>() +
                        "', expected '" + std::string(KindName(kind)) + "'");
    }
    return 0;
  });
  return j;
}

}  // namespace

std::string EncodeBinary(const SampleSketch& s) {
  Writer w;
  WriteHeader(w, RecordKind::kSample, static_cast<std::uint8_t>(s.method), s.m,
              s.seed, s.universe_size);
  w.F64(s.tau);
  w.F64(s.m_prime);
  w.U8(s.aux.has_value() ? 1 : 0);
  w.F64(s.aux.value_or(0.0));
  WritePairs(w, s.keys, s.values);
  return w.Take();
}

std::string EncodeBinary(const LinearSketch& s) {
  Writer w;
  WriteHeader(w, RecordKind::kLinear, static_cast<std::uint8_t>(s.kind), s.m,
              s.seed, s.universe_size);
  w.U64(s.coords.size());
  for (double c : s.coords) w.F64(c);
  return w.Take();
}

std::string EncodeBinary(const CorrelationSketch& s) {
  Writer w;
  WriteHeader(w, RecordKind::kCorrelation, static_cast<std::uint8_t>(s.family),
              s.budget, s.seed, s.universe_size);
  w.F64(s.tau_indicator);
  w.F64(s.tau_base);
  w.F64(s.tau_squared);
  w.F64(s.m_prime);
  for (std::uint64_t c : s.view_counts) w.U64(c);
  WritePairs(w, s.keys, s.values);
  return w.Take();
}

RecordKind PeekRecordKind(std::string_view bytes) {
  Reader r(bytes);
  return ReadHeader(r).kind;
}

SampleSketch DecodeSampleSketch(std::string_view bytes) {
  Reader r(bytes);
  const Header h = ReadHeader(r);
  ExpectKind(h, RecordKind::kSample);
  SampleSketch s;
  s.method = MethodFromWire(h.tag);
  s.m = h.m;
  s.seed = h.seed;
  s.universe_size = h.universe_size;
  s.tau = r.F64();
  s.m_prime = r.F64();
  const bool has_aux = r.U8() != 0;
  const double aux = r.F64();
  if (has_aux) s.aux = aux;
  ReadPairs(r, s.universe_size, s.keys, s.values);
  r.Finish();
  return s;
}

LinearSketch DecodeLinearSketch(std::string_view bytes) {
  Reader r(bytes);
  const Header h = ReadHeader(r);
  ExpectKind(h, RecordKind::kLinear);
  LinearSketch s;
  s.kind = LinearKindFromWire(h.tag);
  s.m = h.m;
  s.seed = h.seed;
  s.universe_size = h.universe_size;
  const std::uint64_t count = r.U64();
  if (count != s.m) throw FormatError("coordinate count differs from m");
  r.NeedItems(count, 8);
  s.coords.resize(count);
  for (double& c : s.coords) c = r.F64();
  r.Finish();
  return s;
}

CorrelationSketch DecodeCorrelationSketch(std::string_view bytes) {
  Reader r(bytes);
  const Header h = ReadHeader(r);
  ExpectKind(h, RecordKind::kCorrelation);
  CorrelationSketch s;
  s.family = FamilyFromWire(h.tag);
  s.budget = h.m;
  s.seed = h.seed;
  s.universe_size = h.universe_size;
  s.tau_indicator = r.F64();
  s.tau_base = r.F64();
  s.tau_squared = r.F64();
  s.m_prime = r.F64();
  for (std::uint64_t& c : s.view_counts) c = r.U64();
  ReadPairs(r, s.universe_size, s.keys, s.values);
  r.Finish();
  return s;
}

std::string EncodeJson(const SampleSketch& s) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "sample";
  j["method"] = MethodTag(s.method);
  j["m"] = s.m;
  j["seed"] = s.seed;
  j["universe_size"] = s.universe_size;
  j["tau"] = DoubleToJson(s.tau);
  j["m_prime"] = DoubleToJson(s.m_prime);
  j["aux"] = s.aux ? DoubleToJson(*s.aux) : json(nullptr);
  j["keys"] = s.keys;
  j["values"] = s.values;
  return j.dump(2);
}

std::string EncodeJson(const LinearSketch& s) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "linear";
  j["method"] = LinearKindTag(s.kind);
  j["m"] = s.m;
  j["seed"] = s.seed;
  j["universe_size"] = s.universe_size;
  j["coords"] = s.coords;
  return j.dump(2);
}

std::string EncodeJson(const CorrelationSketch& s) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "correlation";
  j["family"] = s.family == Family::kThreshold ? "threshold" : "priority";
  j["budget"] = s.budget;
  j["seed"] = s.seed;
  j["universe_size"] = s.universe_size;
  j["tau_indicator"] = DoubleToJson(s.tau_indicator);
  j["tau_base"] = DoubleToJson(s.tau_base);
  j["tau_squared"] = DoubleToJson(s.tau_squared);
  j["m_prime"] = DoubleToJson(s.m_prime);
  j["view_counts"] = s.view_counts;
  j["keys"] = s.keys;
  j["values"] = s.values;
  return j.dump(2);
}

RecordKind PeekJsonRecordKind(std::string_view text) {
  const json j = ParseJson(text);
  return Guard([&] {
    const std::string kind = j.at("kind").get<std::string>();
    for (RecordKind k : {RecordKind::kSample, RecordKind::kLinear,
                         RecordKind::kCorrelation}) {
      if (kind == KindName(k)) return k;
    }
    throw FormatError("unknown record kind '" + kind + "'");
  });
}

SampleSketch DecodeSampleSketchJson(std::string_view text) {
  const json j = CheckedJson(text, RecordKind::kSample);
  SampleSketch s = Guard([&] {
    SampleSketch s;
    s.method = ParseMethodTag(j.at("method").get<std::string>());
    s.m = j.at("m").get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.universe_size = j.at("universe_size").get<std::uint64_t>();
    s.tau = DoubleFromJson(j.at("tau"));
    s.m_prime = DoubleFromJson(j.at("m_prime"));
    if (!j.at("aux").is_null()) s.aux = DoubleFromJson(j.at("aux"));
    s.keys = j.at("keys").get<std::vector<Index>>();
    s.values = j.at("values").get<std::vector<double>>();
    return s;
  });
  if (s.keys.size() != s.values.size()) throw FormatError("keys and values differ in length");
  CheckKeys(s.keys, s.universe_size);
  return s;
}

LinearSketch DecodeLinearSketchJson(std::string_view text) {
  const json j = CheckedJson(text, RecordKind::kLinear);
  LinearSketch s = Guard([&] {
    LinearSketch s;
    const std::string tag = j.at("method").get<std::string>();
    if (tag == LinearKindTag(LinearKind::kJl)) {
      s.kind = LinearKind::kJl;
    } else if (tag == LinearKindTag(LinearKind::kCountSketch)) {
      s.kind = LinearKind::kCountSketch;
    } else {
      throw FormatError("unknown linear sketch '" + tag + "'");
    }
    s.m = j.at("m").get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.universe_size = j.at("universe_size").get<std::uint64_t>();
    s.coords = j.at("coords").get<std::vector<double>>();
    return s;
  });
  if (s.coords.size() != s.m) throw FormatError("coordinate count differs from m");
  return s;
}

CorrelationSketch DecodeCorrelationSketchJson(std::string_view text) {
  const json j = CheckedJson(text, RecordKind::kCorrelation);
  CorrelationSketch s = Guard([&] {
    CorrelationSketch s;
    const std::string family = j.at("family").get<std::string>();
    if (family == "threshold") {
      s.family = Family::kThreshold;
    } else if (family == "priority") {
      s.family = Family::kPriority;
    } else {
      throw FormatError("unknown family '" + family + "'");
    }
    s.budget = j.at("budget").get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.universe_size = j.at("universe_size").get<std::uint64_t>();
    s.tau_indicator = DoubleFromJson(j.at("tau_indicator"));
    s.tau_base = DoubleFromJson(j.at("tau_base"));
    s.tau_squared = DoubleFromJson(j.at("tau_squared"));
    s.m_prime = DoubleFromJson(j.at("m_prime"));
    s.view_counts = j.at("view_counts").get<std::array<std::uint64_t, 3>>();
    s.keys = j.at("keys").get<std::vector<Index>>();
    s.values = j.at("values").get<std::vector<double>>();
    return s;
  });
  if (s.keys.size() != s.values.size()) throw FormatError("keys and values differ in length");
  CheckKeys(s.keys, s.universe_size);
  return s;
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace ipsketch
