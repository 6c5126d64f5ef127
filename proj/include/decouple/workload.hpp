/*
 * Copyright 2026 The decouple Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file workload.hpp
 * @brief Synthetic workloads and the catalog/trace file formats.
 *
 * catalog.json
 *   {"schema": "decouple.catalog/1",
 *    "objects": [{"id": 1, "size": 123, "load_cost": 123}, ...]}
 *   load_cost is optional and defaults to size.
 *
 * trace.jsonl (optionally gzip-compressed)
 *   line 1: {"schema": "decouple.trace/1", "catalog": "catalog.json",
 *            "seed": 7, "generator": {...}}
 *   then one event per line, ordered by (time, seq):
 *   {"seq": 0, "type": "query", "id": 5, "time": 1000, "objects": [3, 4],
 *    "cost": 4096, "tolerance": 0}
 *   {"seq": 1, "type": "update", "id": 9, "time": 1200, "object": 3,
 *    "cost": 512}
 *   Times are integer microseconds, costs integer bytes. "catalog" is
 *   resolved relative to the trace file.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "decouple/types.hpp"

namespace decouple {

class TraceError : public Error {
 public:
  TraceError(std::uint64_t line, const std::string& what);
  /// 1-based line number, 0 when the error is not tied to a line.
  std::uint64_t line() const { return line_; }

 private:
  std::uint64_t line_;
};

struct GeneratorParams {
  std::uint64_t n_objects = 68;
  Bytes size_min = 50 * kMB;
  Bytes size_max = 90 * kGB;

  std::uint64_t n_queries = 10'000;
  std::uint64_t n_updates = 10'000;

  /// Queries centre on one of these with probability query_hotspot_weight.
  /// Consecutive ids form a cluster; the active cluster rotates once per
  /// phase so query interest drifts over the trace.
  std::vector<std::uint64_t> query_hotspots = {22, 23, 24, 62, 63, 64};
  double query_hotspot_weight = 0.9;
  std::uint64_t query_phases = 4;

  /// Update scans start on one of these with probability update_hotspot_weight.
  std::vector<std::uint64_t> update_hotspots = {11, 12, 13, 30, 31, 32};
  double update_hotspot_weight = 0.7;
  /// Each scan emits scan_length updates sweeping scan_width adjacent objects.
  std::uint64_t scan_length = 16;
  std::uint64_t scan_width = 3;

  /// B(q) is a run of 1..max_objects_per_query adjacent objects.
  std::uint64_t max_objects_per_query = 4;

  /// Tolerance mix: 0 with p_zero, small with p_small, otherwise large.
  double tolerance_p_zero = 0.5;
  double tolerance_p_small = 0.3;
  Micros tolerance_small = 1 * kSecond;
  Micros tolerance_large = 60 * kSecond;

  /// Query cost = selectivity * sum of sizes in B(q); selectivity is
  /// log-uniform in [selectivity_min, selectivity_max].
  double selectivity_min = 1e-3;
  double selectivity_max = 1e-1;
  /// Update cost = update_fraction * size of the updated object.
  double update_fraction = 0.04;

  Micros mean_interarrival = 1 * kSecond;
};

/// Throws Error describing the first invalid parameter.
void validate(const GeneratorParams& params);

nlohmann::ordered_json to_json(const GeneratorParams& params);
GeneratorParams generator_params_from_json(const nlohmann::json& j);

struct Workload {
  ObjectCatalog catalog;
  Trace trace;
};

Workload generate(const GeneratorParams& params, std::uint64_t seed);

struct TraceHeader {
  std::string schema = "decouple.trace/1";
  std::string catalog = "catalog.json";
  std::optional<std::uint64_t> seed;
  nlohmann::ordered_json generator = nlohmann::ordered_json::object();
};

void write_catalog(std::ostream& os, const ObjectCatalog& catalog);
ObjectCatalog read_catalog(std::istream& is);
ObjectCatalog read_catalog_file(const std::filesystem::path& path);

void write_trace(std::ostream& os, const TraceHeader& header, const Trace& trace);

/// Streaming reader for trace.jsonl, gzip-transparent.
class TraceReader {
 public:
  explicit TraceReader(const std::filesystem::path& path);
  ~TraceReader();
  TraceReader(const TraceReader&) = delete;
  TraceReader& operator=(const TraceReader&) = delete;

  const TraceHeader& header() const { return header_; }
  /// Next event, or nullopt at end of file. Throws TraceError on malformed
  /// records, naming the line.
  std::optional<Event> next();
  std::uint64_t line() const { return line_; }

 private:
  bool read_line(std::string& out);

  struct GzFile;
  std::unique_ptr<GzFile> file_;
  TraceHeader header_;
  std::uint64_t line_ = 0;
};

/// Parses one event record. `line` is only used in error messages.
Event parse_event(const std::string& text, std::uint64_t line);

struct LoadedTrace {
  TraceHeader header;
  ObjectCatalog catalog;
  Trace trace;
};

/// Reads the catalog named by the trace header (or `catalog_path` when
/// given) and the whole trace, checking order and referential integrity.
LoadedTrace load_trace(const std::filesystem::path& trace_path,
                       const std::optional<std::filesystem::path>& catalog_path = {});

struct ValidationReport {
  bool ok = false;
  std::uint64_t events = 0;
  std::uint64_t queries = 0;
  std::uint64_t updates = 0;
  Bytes query_bytes = 0;
  Bytes update_bytes = 0;
  std::string error;  // first problem found, with its line number
};

ValidationReport validate_trace(const std::filesystem::path& trace_path,
                                const std::optional<std::filesystem::path>& catalog_path = {});

/**
 * Re-partitions a workload onto `granularity` objects laid out in id order.
 * Coarser: adjacent objects merge (sizes add, queries map onto the merged
 * ids). Finer: each object splits into equal pieces; an update lands on one
 * piece and a query touches a contiguous run of pieces, both drawn from
 * `seed`. Costs are unchanged, so totals stay comparable across granularities.
 */
Workload repartition(const Workload& workload, std::uint64_t granularity, std::uint64_t seed);

/// Repeats every update `factor` times (fresh ids, same time, object and
/// cost); queries are untouched.
Trace scale_updates(const Trace& trace, std::uint64_t factor);

}  // namespace decouple
