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

// ipsketch command line: build sketches, estimate from sketch files, and run
// the benchmark grids.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ipsketch/ipsketch.h"
#include "json.hpp"

namespace {

using ipsketch::Index;
using ipsketch::SparseVector;
using nlohmann::json;

struct InputOptions {
  std::string path;
  Index universe = std::numeric_limits<Index>::max();
  bool indexed = false;
  bool count_keys = false;
  bool header = false;
};

void AddInputOptions(CLI::App* cmd, InputOptions& in, const std::string& flag) {
  cmd->add_option(flag, in.path, "CSV file with key,value rows")->required();
  cmd->add_option("--universe", in.universe, "universe size keys are reduced into");
  cmd->add_flag("--indexed", in.indexed, "first column is already an integer index");
  cmd->add_flag("--count-keys", in.count_keys,
                "ignore values; entry = number of rows with the key (join size)");
  cmd->add_flag("--header", in.header, "skip the first row (for --indexed / --count-keys)");
}

std::string Field(const std::string& line, std::size_t& pos) {
  const std::size_t comma = line.find(',', pos);
  std::string out = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
  pos = comma == std::string::npos ? line.size() : comma + 1;
  while (!out.empty() && (out.back() == '\r' || out.back() == ' ')) out.pop_back();
  return out;
}

SparseVector LoadVector(const InputOptions& in, const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ipsketch::ConfigError("cannot open " + path);
  if (!in.indexed && !in.count_keys) return ipsketch::IngestKeyValueCsv(file, in.universe);

  std::vector<std::string> keys;
  std::vector<ipsketch::Entry> entries;
  std::string line;
  std::size_t row = 0;
  while (std::getline(file, line)) {
    ++row;
    if ((row == 1 && in.header) || line.empty() || line == "\r") continue;
    std::size_t pos = 0;
    const std::string key = Field(line, pos);
    if (in.count_keys) {
      keys.push_back(key);
      continue;
    }
    Index index = 0;
    const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
    if (ec != std::errc() || end != key.data() + key.size()) {
      throw ipsketch::FormatError(path + ":" + std::to_string(row) + ": bad index '" + key + "'");
    }
    const std::string value = Field(line, pos);
    try {
      entries.push_back({index, std::stod(value)});
    } catch (const std::exception&) {
      throw ipsketch::FormatError(path + ":" + std::to_string(row) + ": bad value '" + value + "'");
    }
  }
  if (in.count_keys) return ipsketch::KeyFrequencyVector(keys, in.universe);
  return SparseVector(in.universe, std::move(entries));
}

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool LooksBinary(const std::string& bytes) { return bytes.rfind("IPSK", 0) == 0; }

ipsketch::RecordKind Kind(const std::string& bytes) {
  return LooksBinary(bytes) ? ipsketch::PeekRecordKind(bytes) : ipsketch::PeekJsonRecordKind(bytes);
}

template <class T>
T Decode(const std::string& bytes);

template <>
ipsketch::SampleSketch Decode(const std::string& bytes) {
  return LooksBinary(bytes) ? ipsketch::DecodeSampleSketch(bytes)
                            : ipsketch::DecodeSampleSketchJson(bytes);
}

template <>
ipsketch::LinearSketch Decode(const std::string& bytes) {
  return LooksBinary(bytes) ? ipsketch::DecodeLinearSketch(bytes)
                            : ipsketch::DecodeLinearSketchJson(bytes);
}

template <>
ipsketch::CorrelationSketch Decode(const std::string& bytes) {
  return LooksBinary(bytes) ? ipsketch::DecodeCorrelationSketch(bytes)
                            : ipsketch::DecodeCorrelationSketchJson(bytes);
}

template <class Sketch>
void Save(const Sketch& s, const std::string& path, bool as_json) {
  ipsketch::WriteFileBytes(path, as_json ? ipsketch::EncodeJson(s) : ipsketch::EncodeBinary(s));
}

json InnerProductsJson(const ipsketch::JoinInnerProducts& ip) {
  return {{"n", ip.n},           {"sum_x", ip.sum_x},   {"sum_y", ip.sum_y},
          {"ip_xy", ip.ip_xy},   {"sum_x2", ip.sum_x2}, {"sum_y2", ip.sum_y2}};
}

json CorrelationJson(const ipsketch::CorrelationResult& r) {
  json out = {{"rho", r.rho ? json(*r.rho) : json(nullptr)}};
  if (!r.diagnostic.empty()) out["diagnostic"] = r.diagnostic;
  return out;
}

// --- sketch ---------------------------------------------------------------

struct SketchArgs {
  InputOptions input;
  std::string method = "priority_l2";
  std::uint64_t m = 100;
  std::uint64_t seed = 0;
  bool fixed = false;
  std::string output;
  bool json = false;
};

int RunSketch(const SketchArgs& args) {
  const SparseVector a = LoadVector(args.input, args.input.path);
  const std::string& method = args.method;
  double words = 0.0;
  std::size_t size = 0;
  if (method == "jl" || method == "countsketch") {
    const auto kind = method == "jl" ? ipsketch::LinearKind::kJl : ipsketch::LinearKind::kCountSketch;
    const auto s = ipsketch::MakeLinearSketch(kind, a, args.seed, args.m);
    Save(s, args.output, args.json);
    words = ipsketch::StorageWords(s);
    size = s.coords.size();
  } else if (method == "correlation_threshold" || method == "correlation_priority") {
    const auto s = method == "correlation_threshold"
                       ? ipsketch::CorrelationThresholdSketch(a, args.seed, args.m)
                       : ipsketch::CorrelationPrioritySketch(a, args.seed, args.m);
    Save(s, args.output, args.json);
    words = ipsketch::StorageWords(s);
    size = s.size();
  } else {
    const auto s = ipsketch::VariantSketch(a, args.seed, args.m,
                                           ipsketch::ParseMethodTag(method), !args.fixed);
    Save(s, args.output, args.json);
    words = ipsketch::StorageWords(s);
    size = s.size();
  }
  std::cout << json{{"output", args.output},
                    {"method", method},
                    {"nnz", a.nnz()},
                    {"size", size},
                    {"storage_words", words}}
                   .dump()
            << "\n";
  return 0;
}

// --- estimate -------------------------------------------------------------

int RunEstimate(const std::string& path_a, const std::string& path_b) {
  const std::string bytes_a = ipsketch::ReadFileBytes(path_a);
  const std::string bytes_b = ipsketch::ReadFileBytes(path_b);
  const auto kind = Kind(bytes_a);
  if (kind != Kind(bytes_b)) throw ipsketch::ContractError("sketch files are of different kinds");
  json out;
  switch (kind) {
    case ipsketch::RecordKind::kSample: {
      const auto sa = Decode<ipsketch::SampleSketch>(bytes_a);
      const auto sb = Decode<ipsketch::SampleSketch>(bytes_b);
      const ipsketch::EstimateReport r = ipsketch::EstimateInnerProduct(sa, sb);
      out = {{"estimate", r.estimate},
             {"matched_count", r.matched_count},
             {"method_a", ipsketch::MethodTag(sa.method)},
             {"method_b", ipsketch::MethodTag(sb.method)}};
      break;
    }
    case ipsketch::RecordKind::kLinear: {
      const auto sa = Decode<ipsketch::LinearSketch>(bytes_a);
      const auto sb = Decode<ipsketch::LinearSketch>(bytes_b);
      out = {{"estimate", ipsketch::LinearEstimate(sa, sb)},
             {"method", ipsketch::LinearKindTag(sa.kind)}};
      break;
    }
    case ipsketch::RecordKind::kCorrelation: {
      const auto ga = Decode<ipsketch::CorrelationSketch>(bytes_a);
      const auto gb = Decode<ipsketch::CorrelationSketch>(bytes_b);
      const auto ip = ipsketch::EstimateJoinInnerProducts(ga, gb);
      out = {{"estimate", ip.ip_xy}, {"inner_products", InnerProductsJson(ip)}};
      try {
        out["correlation"] = CorrelationJson(ipsketch::CorrelationFormula(ip));
      } catch (const ipsketch::NoOverlapError& e) {
        out["correlation"] = {{"rho", nullptr}, {"diagnostic", e.what()}};
      }
      break;
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// --- corr -----------------------------------------------------------------

struct CorrArgs {
  InputOptions table_a;
  std::string table_b;
  std::string method = "ps-weighted";
  double budget = 400;
  std::uint64_t seed = 0;
};

int RunCorr(const CorrArgs& args) {
  const SparseVector a = LoadVector(args.table_a, args.table_a.path);
  const SparseVector b = LoadVector(args.table_a, args.table_b);
  const auto method = ipsketch::ParseBenchMethod(args.method, ipsketch::ExperimentKind::kCorrelation);
  const ipsketch::MethodOutcome r = ipsketch::RunCorrelationMethod(method, a, b, args.budget, args.seed);
  json out = {{"method", args.method},
              {"budget_words", args.budget},
              {"seed", args.seed},
              {"estimate", r.estimate ? json(*r.estimate) : json(nullptr)},
              {"sketch_size", r.sketch_size},
              {"join_size", ipsketch::OverlapSize(a, b)}};
  if (!r.diagnostic.empty()) out["diagnostic"] = r.diagnostic;
  try {
    out["exact"] = CorrelationJson(ipsketch::CorrelationFormula(ipsketch::ExactJoinInnerProducts(a, b)));
  } catch (const ipsketch::NoOverlapError&) {
    out["exact"] = {{"rho", nullptr}, {"diagnostic", "tables share no keys"}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// --- bench-* --------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::string results = "results.csv";
  std::string summary = "summary.csv";
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

int RunBench(ipsketch::ExperimentKind kind, const BenchArgs& args) {
  json raw;
  try {
    raw = json::parse(ipsketch::ReadFileBytes(args.config));
  } catch (const json::exception& e) {
    throw ipsketch::ConfigError(args.config + ": " + e.what());
  }
  const std::string tag(ipsketch::ExperimentKindTag(kind));
  if (!raw.is_object()) throw ipsketch::ConfigError(args.config + ": expected a JSON object");
  if (raw.contains("experiment") && raw["experiment"] != tag) {
    throw ipsketch::ConfigError(args.config + ": experiment is " + raw["experiment"].dump() +
                                " but this command runs \"" + tag + "\"");
  }
  raw["experiment"] = tag;
  ipsketch::ExperimentConfig config = ipsketch::ParseExperimentConfig(raw.dump());
  if (args.seed) config.seed = *args.seed;

  const auto rows = ipsketch::RunExperiment(config);
  const auto summary = ipsketch::Summarize(rows);
  {
    std::ostringstream out;
    ipsketch::WriteResultsCsv(out, rows, args.timing);
    ipsketch::WriteFileBytes(args.results, out.str());
  }
  {
    std::ostringstream out;
    ipsketch::WriteSummaryCsv(out, summary);
    ipsketch::WriteFileBytes(args.summary, out.str());
  }
  for (const ipsketch::SummaryRow& s : summary) {
    std::cout << s.method << " spec=" << s.spec << " overlap=" << Num(s.overlap)
              << " words=" << Num(s.storage_words) << " mean_error=" << Num(s.mean_error)
              << " r2=" << Num(s.r_squared) << "\n";
  }
  std::cerr << rows.size() << " rows -> " << args.results << ", " << summary.size()
            << " summary rows -> " << args.summary << "\n";
  return 0;
}

// --- ingest ---------------------------------------------------------------

int RunIngest(const InputOptions& in, const std::string& output) {
  const SparseVector a = LoadVector(in, in.path);
  if (!output.empty()) {
    std::ostringstream out;
    out << "index,value\n";
    for (const ipsketch::Entry& e : a.entries()) out << e.index << "," << Num(e.value) << "\n";
    ipsketch::WriteFileBytes(output, out.str());
  }
  const ipsketch::Norms norms = ipsketch::ComputeNorms(a);
  std::cout << json{{"nnz", a.nnz()},
                    {"universe_size", a.universe_size()},
                    {"l1", norms.l1},
                    {"l2_squared", norms.l2_squared}}
                   .dump()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling sketches for inner product and join-correlation estimation"};
  app.require_subcommand(1);

  SketchArgs sketch;
  auto* cmd_sketch = app.add_subcommand("sketch", "sketch one vector into a file");
  AddInputOptions(cmd_sketch, sketch.input, "--input");
  cmd_sketch
      ->add_option("--method", sketch.method,
                   "threshold_l2, priority_l2, threshold_l1, priority_l1, threshold_uniform, "
                   "priority_uniform, jl, countsketch, correlation_threshold, "
                   "correlation_priority")
      ->capture_default_str();
  cmd_sketch->add_option("-m,--size", sketch.m, "samples (or coordinates)")->capture_default_str();
  cmd_sketch->add_option("--seed", sketch.seed, "hash seed; equal seeds make sketches comparable")
      ->capture_default_str();
  cmd_sketch->add_flag("--fixed-threshold", sketch.fixed,
                       "threshold sampling with m' = m instead of the adaptive m'");
  cmd_sketch->add_option("-o,--output", sketch.output, "sketch file")->required();
  cmd_sketch->add_flag("--json", sketch.json, "write the JSON form instead of binary");

  std::string est_a, est_b;
  auto* cmd_estimate = app.add_subcommand("estimate", "estimate <a, b> from two sketch files");
  cmd_estimate->add_option("--sketch-a", est_a)->required();
  cmd_estimate->add_option("--sketch-b", est_b)->required();

  CorrArgs corr;
  auto* cmd_corr = app.add_subcommand("corr", "estimate the post-join correlation of two tables");
  AddInputOptions(cmd_corr, corr.table_a, "--table-a");
  cmd_corr->add_option("--table-b", corr.table_b, "CSV file with key,value rows")->required();
  cmd_corr->add_option("--method", corr.method)->capture_default_str();
  cmd_corr->add_option("--budget", corr.budget, "storage words per table")->capture_default_str();
  cmd_corr->add_option("--seed", corr.seed)->capture_default_str();

  struct BenchCommand {
    const char* name;
    ipsketch::ExperimentKind kind;
    const char* help;
  };
  const BenchCommand benches[] = {
      {"bench-ip", ipsketch::ExperimentKind::kInnerProduct, "real-valued inner product grid"},
      {"bench-binary", ipsketch::ExperimentKind::kBinary, "binary vector grid"},
      {"bench-corr", ipsketch::ExperimentKind::kCorrelation, "join correlation grid"},
      {"bench-joinsize", ipsketch::ExperimentKind::kJoinSize, "Zipf join size grid"},
  };
  BenchArgs bench;
  std::vector<std::pair<CLI::App*, ipsketch::ExperimentKind>> bench_cmds;
  for (const BenchCommand& b : benches) {
    auto* cmd = app.add_subcommand(b.name, b.help);
    cmd->add_option("--config", bench.config, "JSON experiment file")->required();
    cmd->add_option("--results", bench.results, "per-trial CSV")->capture_default_str();
    cmd->add_option("--summary", bench.summary, "per-cell summary CSV")->capture_default_str();
    cmd->add_option("--seed", bench.seed, "override the config seed");
    cmd->add_flag("--timing", bench.timing, "add wall-clock columns (not reproducible)");
    bench_cmds.emplace_back(cmd, b.kind);
  }

  InputOptions ingest;
  std::string ingest_out;
  auto* cmd_ingest = app.add_subcommand("ingest", "read a CSV into a sparse vector");
  AddInputOptions(cmd_ingest, ingest, "--input");
  cmd_ingest->add_option("-o,--output", ingest_out, "write index,value rows here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_sketch) return RunSketch(sketch);
    if (*cmd_estimate) return RunEstimate(est_a, est_b);
    if (*cmd_corr) return RunCorr(corr);
    if (*cmd_ingest) return RunIngest(ingest, ingest_out);
    for (const auto& [cmd, kind] : bench_cmds) {
      if (*cmd) return RunBench(kind, bench);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
