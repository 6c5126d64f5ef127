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

#include "decouple/simharness.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include <json.hpp>

#include "decouple/benefit.hpp"
#include "decouple/vcover.hpp"

namespace decouple {

namespace {

std::string audit_message(std::uint64_t index, const std::string& what) {
  std::ostringstream msg;
  msg << "audit failed at event " << index << ": " << what;
  return msg.str();
}

Traffic snapshot(const TrafficLedger& ledger) {
  return {ledger.query_ship(), ledger.update_ship(), ledger.load()};
}

nlohmann::ordered_json traffic_json(const Traffic& t) {
  nlohmann::ordered_json j;
  j["query_ship"] = t.query_ship;
  j["update_ship"] = t.update_ship;
  j["load"] = t.load;
  j["total"] = t.total();
  return j;
}

nlohmann::ordered_json summary(const RunReport& r) {
  nlohmann::ordered_json j;
  j["policy"] = r.policy;
  j["label"] = r.label;
  j["seed"] = r.seed;
  j["capacity"] = r.capacity;
  j["events"] = r.events;
  j["warmup_events"] = r.warmup_events;
  j["traffic"] = traffic_json(r.traffic());
  j["post_warmup"] = traffic_json(r.post_warmup());
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [kind, n] : r.decision_counts) counts[kind] = n;
  j["decisions"] = counts;
  j["audit"] = {{"passed", r.audit_passed}, {"answers_checked", r.answers_checked}};
  return j;
}

}  // namespace

AuditError::AuditError(std::uint64_t event_index, const std::string& what)
    : Error(audit_message(event_index, what)), event_index_(event_index) {}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::vcover: return "vcover";
    case PolicyKind::benefit: return "benefit";
    case PolicyKind::nocache: return "nocache";
    case PolicyKind::replica: return "replica";
    case PolicyKind::soptimal: return "soptimal";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  for (PolicyKind k : {PolicyKind::vcover, PolicyKind::benefit, PolicyKind::nocache,
                       PolicyKind::replica, PolicyKind::soptimal}) {
    if (to_string(k) == name) return k;
  }
  throw Error("unknown policy '" + std::string(name) + "'");
}

Bytes CacheSize::resolve(const ObjectCatalog& catalog) const {
  if (bytes) {
    if (*bytes < 0) throw Error("cache size must not be negative");
    return *bytes;
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("cache fraction must lie in (0, 1]");
  return static_cast<Bytes>(std::floor(fraction * static_cast<double>(catalog.total_size())));
}

Traffic RunReport::traffic() const { return snapshot(ledger); }

Traffic RunReport::post_warmup() const {
  const Traffic all = traffic();
  return {all.query_ship - at_warmup.query_ship, all.update_ship - at_warmup.update_ship,
          all.load - at_warmup.load};
}

RunReport simulate(Policy& policy, const Trace& trace, const ObjectCatalog& catalog,
                   const RunOptions& options) {
  if (options.sample_stride < 1) throw Error("sample stride must be at least 1");

  RunReport report;
  report.policy = std::string(policy.name());
  report.label = report.policy;
  report.events = trace.size();
  report.warmup_events = options.warmup_events;
  report.initial_cache = policy.cache();
  report.capacity = report.initial_cache.capacity();

  CacheState audit = report.initial_cache;

  // Applies one decision to the audit copy and charges it.
  auto take = [&](const Decision& d, std::int64_t event, std::uint64_t seq) {
    const std::uint64_t index = event < 0 ? 0 : static_cast<std::uint64_t>(event);
    if (const auto* answer = std::get_if<AnswerFromCache>(&d)) {
      if (event < 0 || !trace.at(index).is_query() ||
          trace[index].query().id != answer->query) {
        throw AuditError(index, "cache answer for a query that is not being served");
      }
      const Query& q = trace[index].query();
      if (!audit.all_resident(q.objects)) {
        throw AuditError(index, "cache answer while an accessed object is missing");
      }
      if (!interacting_updates(q, audit, q.time).empty()) {
        throw AuditError(index, "cache answer misses updates older than the tolerance");
      }
      ++report.answers_checked;
    }
    try {
      audit.apply(d, catalog);
    } catch (const CacheError& e) {
      throw AuditError(index, e.what());
    }
    report.ledger.record(d, catalog, seq);
    ++report.decision_counts[std::string(decision_kind(d))];
    if (options.keep_log) report.log.push_back({event, d});
  };

  auto sample = [&](std::uint64_t processed, std::uint64_t seq) {
    const Traffic t = snapshot(report.ledger);
    report.series.push_back(
        {processed, seq, t.query_ship, t.update_ship, t.load, t.total(), audit.used()});
  };

  // The warm-up prefix includes whatever the policy does before the first event.
  for (const Decision& d : policy.start()) take(d, -1, 0);

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Event& ev = trace[i];
    if (i > 0 && (ev.time() < trace[i - 1].time() || ev.seq <= trace[i - 1].seq)) {
      throw AuditError(i, "trace is not ordered by (time, seq)");
    }
    const auto event = static_cast<std::int64_t>(i);
    std::vector<Decision> decisions;
    if (ev.is_query()) {
      decisions = policy.on_query(ev.query());
      std::size_t resolutions = 0;
      for (const Decision& d : decisions) {
        const auto* sq = std::get_if<ShipQuery>(&d);
        const auto* ac = std::get_if<AnswerFromCache>(&d);
        if ((sq && sq->query == ev.query().id) || (ac && ac->query == ev.query().id)) {
          ++resolutions;
        }
      }
      if (resolutions != 1) throw AuditError(i, "query not resolved exactly once");
    } else {
      audit.receive(ev.update());
      decisions = policy.on_update(ev.update());
    }
    for (const Decision& d : decisions) take(d, event, ev.seq);

    try {
      audit.check_invariants(catalog);
    } catch (const CacheError& e) {
      throw AuditError(i, e.what());
    }
    if (audit.resident_set() != policy.cache().resident_set()) {
      throw AuditError(i, "policy cache diverged from applied decisions");
    }

    const std::uint64_t processed = i + 1;
    if (processed == options.warmup_events) report.at_warmup = snapshot(report.ledger);
    if (processed % options.sample_stride == 0 || processed == trace.size()) {
      sample(processed, ev.seq);
    }
  }
  for (const Decision& d : policy.finalize()) {
    take(d, static_cast<std::int64_t>(trace.empty() ? 0 : trace.size() - 1),
         trace.empty() ? 0 : trace.back().seq);
  }
  if (options.warmup_events > trace.size()) report.at_warmup = snapshot(report.ledger);

  if (audit != policy.cache()) {
    throw AuditError(trace.empty() ? 0 : trace.size() - 1,
                     "policy cache diverged from applied decisions");
  }
  report.final_cache = audit;
  report.audit_passed = true;
  return report;
}

std::unique_ptr<Policy> make_policy(const RunConfig& config, const Trace& trace,
                                    const ObjectCatalog& catalog) {
  const Bytes capacity = config.capacity.resolve(catalog);
  switch (config.policy) {
    case PolicyKind::vcover:
      return std::make_unique<VCoverPolicy>(catalog, capacity, config.seed);
    case PolicyKind::benefit:
      return std::make_unique<BenefitPolicy>(catalog, capacity, config.params.alpha,
                                             config.params.delta);
    case PolicyKind::nocache:
      return std::make_unique<NoCachePolicy>();
    case PolicyKind::replica:
      return std::make_unique<ReplicaPolicy>(catalog);
    case PolicyKind::soptimal:
      return std::make_unique<StaticSetPolicy>(catalog, capacity,
                                               soptimal_plan(trace, catalog, capacity).static_set,
                                               config.params.soptimal_shipping);
  }
  throw Error("unhandled policy kind");
}

RunReport run(const Trace& trace, const ObjectCatalog& catalog, const RunConfig& config) {
  std::unique_ptr<Policy> policy = make_policy(config, trace, catalog);
  RunReport report = simulate(*policy, trace, catalog, config.options);
  report.seed = config.seed;
  if (!config.label.empty()) report.label = config.label;
  return report;
}

ComparisonReport compare(const Trace& trace, const ObjectCatalog& catalog,
                         const std::vector<RunConfig>& configs, bool parallel) {
  ComparisonReport out;
  if (!parallel) {
    for (const RunConfig& c : configs) out.runs.push_back(run(trace, catalog, c));
    return out;
  }
  std::vector<std::future<RunReport>> pending;
  pending.reserve(configs.size());
  for (const RunConfig& c : configs) {
    pending.push_back(std::async(std::launch::async,
                                 [&trace, &catalog, c] { return run(trace, catalog, c); }));
  }
  for (auto& f : pending) out.runs.push_back(f.get());
  return out;
}

ReplayResult replay(const RunReport& report, const Trace& trace, const ObjectCatalog& catalog) {
  ReplayResult out{report.initial_cache, {}};
  std::size_t next = 0;
  auto apply_until = [&](std::int64_t event, std::uint64_t seq) {
    while (next < report.log.size() && report.log[next].event == event) {
      out.cache.apply(report.log[next].decision, catalog);
      out.ledger.record(report.log[next].decision, catalog, seq);
      ++next;
    }
  };
  apply_until(-1, 0);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!trace[i].is_query()) out.cache.receive(trace[i].update());
    apply_until(static_cast<std::int64_t>(i), trace[i].seq);
  }
  if (next != report.log.size()) throw Error("decision log does not match the trace");
  return out;
}

void write_series_csv(std::ostream& os, const RunReport& report) {
  os << "event,seq,query_ship,update_ship,load,total,occupancy\n";
  for (const SeriesPoint& p : report.series) {
    os << p.event << ',' << p.seq << ',' << p.query_ship << ',' << p.update_ship << ','
       << p.load << ',' << p.total << ',' << p.occupancy << '\n';
  }
}

void write_summary_json(std::ostream& os, const RunReport& report) {
  os << summary(report).dump(2) << '\n';
}

void write_decision_log(std::ostream& os, const RunReport& report) {
  os << "event,decision\n";
  for (const LoggedDecision& d : report.log) os << d.event << ',' << describe(d.decision) << '\n';
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& report) {
  os << "event,seq";
  for (const RunReport& r : report.runs) os << ',' << r.label;
  os << '\n';
  if (report.runs.empty()) return;
  const std::size_t rows = report.runs.front().series.size();
  for (const RunReport& r : report.runs) {
    if (r.series.size() != rows) throw Error("comparison runs have misaligned series");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const SeriesPoint& head = report.runs.front().series[i];
    os << head.event << ',' << head.seq;
    for (const RunReport& r : report.runs) os << ',' << r.series[i].total;
    os << '\n';
  }
}

void write_comparison_json(std::ostream& os, const ComparisonReport& report) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const RunReport& r : report.runs) {
    runs.push_back(summary(r));
    table.push_back({{"label", r.label}, {"total", r.traffic().total()},
                     {"post_warmup_total", r.post_warmup().total()}});
  }
  j["runs"] = runs;
  j["table"] = table;
  os << j.dump(2) << '\n';
}

}  // namespace decouple
