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
 * @file yardsticks.hpp
 * @brief Reference policies: no cache at all, a full replica kept current by
 *        shipping every update, and the best static object set chosen with
 *        hindsight over the whole trace.
 */

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "decouple/cache.hpp"
#include "decouple/policy.hpp"

namespace decouple {

class NoCachePolicy final : public Policy {
 public:
  NoCachePolicy() = default;
  std::string_view name() const override { return "nocache"; }
  const CacheState& cache() const override { return cache_; }
  std::vector<Decision> on_query(const Query& q) override;
  std::vector<Decision> on_update(const Update&) override { return {}; }

 private:
  CacheState cache_{0};
};

/// Holds every object (capacity and load costs ignored) and ships each
/// update as soon as it arrives.
class ReplicaPolicy final : public Policy {
 public:
  explicit ReplicaPolicy(const ObjectCatalog& catalog);
  std::string_view name() const override { return "replica"; }
  const CacheState& cache() const override { return cache_; }
  std::vector<Decision> on_query(const Query& q) override;
  std::vector<Decision> on_update(const Update& u) override;

 private:
  const ObjectCatalog* catalog_;
  CacheState cache_;
};

enum class UpdateShipping {
  eager,  // ship updates for cached objects as they arrive
  lazy,   // ship them when a query needs them
};

struct SOptimalPlan {
  std::vector<ObjectId> static_set;        // in ranking order
  std::map<ObjectId, Bytes> whole_trace_benefit;
};

/**
 * Scores every object over the whole trace the way one benefit window would
 * (query shares minus update traffic minus one load) and fills `capacity`
 * greedily with the positively scored objects.
 */
SOptimalPlan soptimal_plan(const Trace& trace, const ObjectCatalog& catalog, Bytes capacity);

/// Loads a fixed object set up front and never evicts.
class StaticSetPolicy final : public Policy {
 public:
  StaticSetPolicy(const ObjectCatalog& catalog, Bytes capacity,
                  std::vector<ObjectId> static_set, UpdateShipping shipping);

  std::string_view name() const override { return "soptimal"; }
  const CacheState& cache() const override { return cache_; }
  std::vector<Decision> start() override;
  std::vector<Decision> on_query(const Query& q) override;
  std::vector<Decision> on_update(const Update& u) override;

 private:
  const ObjectCatalog* catalog_;
  CacheState cache_;
  std::vector<ObjectId> static_set_;
  UpdateShipping shipping_;
};

/// Ledger of each yardstick over a whole trace.
TrafficLedger nocache(const Trace& trace, const ObjectCatalog& catalog);
TrafficLedger replica(const Trace& trace, const ObjectCatalog& catalog);
std::pair<SOptimalPlan, TrafficLedger> soptimal(const Trace& trace, const ObjectCatalog& catalog,
                                                Bytes capacity,
                                                UpdateShipping shipping = UpdateShipping::eager);

/// Replay cost of an arbitrary static set (used to audit the greedy choice).
Bytes static_set_cost(const Trace& trace, const ObjectCatalog& catalog, Bytes capacity,
                      const std::vector<ObjectId>& static_set,
                      UpdateShipping shipping = UpdateShipping::eager);

}  // namespace decouple
