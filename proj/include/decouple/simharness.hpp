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
 * @file simharness.hpp
 * @brief Deterministic trace replay.
 *
 * The simulator owns an independent copy of the cache. Every decision a
 * policy emits is applied to that copy and charged to the ledger, and every
 * answer served from the cache is audited against the query's staleness
 * tolerance at the moment it is served. Loads are instantaneous.
 *
 * Report formats (column and key order is fixed):
 *
 *   series CSV      event,seq,query_ship,update_ship,load,total,occupancy
 *   comparison CSV  event,seq,<label>... (cumulative total per run)
 *   summary JSON    policy, label, seed, capacity, events, warmup_events,
 *                   traffic{query_ship,update_ship,load,total},
 *                   post_warmup{...same...}, decisions{kind: count},
 *                   audit{passed, answers_checked}
 */

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "decouple/cache.hpp"
#include "decouple/policy.hpp"
#include "decouple/yardsticks.hpp"

namespace decouple {

class AuditError : public Error {
 public:
  AuditError(std::uint64_t event_index, const std::string& what);
  std::uint64_t event_index() const { return event_index_; }

 private:
  std::uint64_t event_index_;
};

enum class PolicyKind { vcover, benefit, nocache, replica, soptimal };

std::string_view to_string(PolicyKind kind);
/// Throws Error on an unknown name.
PolicyKind parse_policy(std::string_view name);

struct PolicyParams {
  double alpha = 0.5;          // benefit smoothing
  std::uint64_t delta = 1000;  // benefit window, in events
  UpdateShipping soptimal_shipping = UpdateShipping::eager;
};

/// Cache size, either absolute or as a fraction of the catalog's total size.
struct CacheSize {
  std::optional<Bytes> bytes;
  double fraction = 0.3;

  Bytes resolve(const ObjectCatalog& catalog) const;
};

struct RunOptions {
  std::uint64_t warmup_events = 0;
  std::uint64_t sample_stride = 100;
  bool keep_log = true;
};

struct RunConfig {
  PolicyKind policy = PolicyKind::vcover;
  std::string label;  // defaults to the policy name
  PolicyParams params;
  CacheSize capacity;
  std::uint64_t seed = 1;
  RunOptions options;
};

struct SeriesPoint {
  std::uint64_t event = 0;  // events processed so far
  std::uint64_t seq = 0;    // trace sequence number of the last one
  Bytes query_ship = 0;
  Bytes update_ship = 0;
  Bytes load = 0;
  Bytes total = 0;
  Bytes occupancy = 0;
  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct Traffic {
  Bytes query_ship = 0;
  Bytes update_ship = 0;
  Bytes load = 0;
  Bytes total() const { return query_ship + update_ship + load; }
  friend bool operator==(const Traffic&, const Traffic&) = default;
};

/// A decision and the index of the event that produced it (-1: before the
/// first event).
struct LoggedDecision {
  std::int64_t event = -1;
  Decision decision;
  friend bool operator==(const LoggedDecision&, const LoggedDecision&) = default;
};

struct RunReport {
  std::string policy;
  std::string label;
  std::uint64_t seed = 0;
  Bytes capacity = 0;
  std::uint64_t events = 0;
  std::uint64_t warmup_events = 0;

  TrafficLedger ledger;
  Traffic at_warmup;  // cumulative traffic once the warm-up prefix was processed
  std::vector<SeriesPoint> series;
  std::map<std::string, std::uint64_t> decision_counts;
  bool audit_passed = false;
  std::uint64_t answers_checked = 0;

  CacheState initial_cache;
  CacheState final_cache;
  std::vector<LoggedDecision> log;

  Traffic traffic() const;
  Traffic post_warmup() const;
};

/// Replays `trace` through `policy`. Throws AuditError naming the offending
/// event when a decision is inconsistent or an answer is too stale.
RunReport simulate(Policy& policy, const Trace& trace, const ObjectCatalog& catalog,
                   const RunOptions& options);

std::unique_ptr<Policy> make_policy(const RunConfig& config, const Trace& trace,
                                    const ObjectCatalog& catalog);

RunReport run(const Trace& trace, const ObjectCatalog& catalog, const RunConfig& config);

struct ComparisonReport {
  std::vector<RunReport> runs;
};

/// Runs each configuration on the same trace, concurrently when `parallel`.
ComparisonReport compare(const Trace& trace, const ObjectCatalog& catalog,
                         const std::vector<RunConfig>& configs, bool parallel = true);

struct ReplayResult {
  CacheState cache;
  TrafficLedger ledger;
};

/// Re-applies a report's decision log to its initial cache.
ReplayResult replay(const RunReport& report, const Trace& trace, const ObjectCatalog& catalog);

void write_series_csv(std::ostream& os, const RunReport& report);
void write_summary_json(std::ostream& os, const RunReport& report);
void write_decision_log(std::ostream& os, const RunReport& report);
void write_comparison_csv(std::ostream& os, const ComparisonReport& report);
void write_comparison_json(std::ostream& os, const ComparisonReport& report);

}  // namespace decouple
