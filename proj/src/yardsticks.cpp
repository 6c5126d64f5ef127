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

#include "decouple/yardsticks.hpp"

#include "decouple/benefit.hpp"
#include "decouple/simharness.hpp"

namespace decouple {

std::vector<Decision> NoCachePolicy::on_query(const Query& q) {
  return {ShipQuery{q.id, q.ship_cost}};
}

ReplicaPolicy::ReplicaPolicy(const ObjectCatalog& catalog)
    : catalog_(&catalog), cache_(catalog.total_size()) {
  for (ObjectId o : catalog.ids()) cache_.seed(o, catalog);
}

std::vector<Decision> ReplicaPolicy::on_query(const Query& q) {
  return {AnswerFromCache{q.id}};
}

std::vector<Decision> ReplicaPolicy::on_update(const Update& u) {
  cache_.receive(u);
  ShipUpdates ship{{u}};
  cache_.apply(ship, *catalog_);
  return {std::move(ship)};
}

SOptimalPlan soptimal_plan(const Trace& trace, const ObjectCatalog& catalog, Bytes capacity) {
  // A single window over the whole trace, with nothing cached.
  const CacheState empty(capacity);
  WindowStats stats;
  for (const Event& ev : trace) {
    if (ev.is_query()) {
      accrue_query(stats, ev.query(), false, empty, catalog);
    } else {
      accrue_update(stats, ev.update(), empty);
    }
  }
  SOptimalPlan plan;
  std::map<ObjectId, double> score;
  for (ObjectId o : catalog.ids()) {
    const Bytes b = stats.benefit(o, false, catalog);
    plan.whole_trace_benefit[o] = b;
    score[o] = static_cast<double>(b);
  }
  plan.static_set = greedy_selection(score, capacity, catalog);
  return plan;
}

StaticSetPolicy::StaticSetPolicy(const ObjectCatalog& catalog, Bytes capacity,
                                 std::vector<ObjectId> static_set, UpdateShipping shipping)
    : catalog_(&catalog), cache_(capacity), static_set_(std::move(static_set)),
      shipping_(shipping) {}

std::vector<Decision> StaticSetPolicy::start() {
  std::vector<Decision> out;
  for (ObjectId o : static_set_) {
    if (cache_.resident(o)) continue;
    Load load{o};
    cache_.apply(load, *catalog_);
    out.emplace_back(load);
  }
  return out;
}

std::vector<Decision> StaticSetPolicy::on_query(const Query& q) {
  if (!cache_.all_resident(q.objects)) return {ShipQuery{q.id, q.ship_cost}};
  std::vector<Decision> out;
  std::vector<Update> needed = interacting_updates(q, cache_, q.time);
  if (!needed.empty()) {
    ShipUpdates ship{std::move(needed)};
    cache_.apply(ship, *catalog_);
    out.emplace_back(std::move(ship));
  }
  out.emplace_back(AnswerFromCache{q.id});
  return out;
}

std::vector<Decision> StaticSetPolicy::on_update(const Update& u) {
  if (!cache_.receive(u) || shipping_ == UpdateShipping::lazy) return {};
  ShipUpdates ship{{u}};
  cache_.apply(ship, *catalog_);
  return {std::move(ship)};
}

namespace {

TrafficLedger drive(Policy& policy, const Trace& trace, const ObjectCatalog& catalog) {
  return simulate(policy, trace, catalog, RunOptions{.keep_log = false}).ledger;
}

}  // namespace

TrafficLedger nocache(const Trace& trace, const ObjectCatalog& catalog) {
  NoCachePolicy policy;
  return drive(policy, trace, catalog);
}

TrafficLedger replica(const Trace& trace, const ObjectCatalog& catalog) {
  ReplicaPolicy policy(catalog);
  return drive(policy, trace, catalog);
}

std::pair<SOptimalPlan, TrafficLedger> soptimal(const Trace& trace, const ObjectCatalog& catalog,
                                                Bytes capacity, UpdateShipping shipping) {
  SOptimalPlan plan = soptimal_plan(trace, catalog, capacity);
  StaticSetPolicy policy(catalog, capacity, plan.static_set, shipping);
  TrafficLedger ledger = drive(policy, trace, catalog);
  return {std::move(plan), std::move(ledger)};
}

Bytes static_set_cost(const Trace& trace, const ObjectCatalog& catalog, Bytes capacity,
                      const std::vector<ObjectId>& static_set, UpdateShipping shipping) {
  StaticSetPolicy policy(catalog, capacity, static_set, shipping);
  return drive(policy, trace, catalog).total();
}

}  // namespace decouple
