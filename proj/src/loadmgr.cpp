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

#include "decouple/loadmgr.hpp"

#include <algorithm>
#include <set>

namespace decouple {

namespace {

double unit_credit(ObjectId o, const ObjectCatalog& catalog) {
  const ObjectInfo& info = catalog.at(o);
  return static_cast<double>(info.load_cost) / static_cast<double>(info.size);
}

}  // namespace

CandidacyBatch offer(const Query& q, const CacheState& cache,
                     const ObjectCatalog& catalog, Rng& rng) {
  std::vector<ObjectId> missing;
  for (ObjectId o : q.objects) {
    if (!cache.resident(o)) missing.push_back(o);
  }
  std::shuffle(missing.begin(), missing.end(), rng);

  CandidacyBatch batch;
  Bytes remaining = q.ship_cost;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (ObjectId o : missing) {
    if (remaining <= 0) break;
    const Bytes load_cost = catalog.load_cost(o);
    if (remaining >= load_cost) {
      batch.push_back(o);
      remaining -= load_cost;
    } else {
      // Nominated with probability remaining / load_cost.
      if (coin(rng) * static_cast<double>(load_cost) < static_cast<double>(remaining)) {
        batch.push_back(o);
      }
      remaining = 0;
    }
  }
  return batch;
}

GdsState gds_touch(GdsState state, ObjectId o, const ObjectCatalog& catalog) {
  state.credit[o] = state.inflation + unit_credit(o, catalog);
  return state;
}

std::pair<GdsState, std::vector<Decision>> gds_lazy_apply(GdsState state,
                                                          const CacheState& cache,
                                                          const CandidacyBatch& batch,
                                                          const ObjectCatalog& catalog) {
  std::map<ObjectId, double> sim;
  for (ObjectId o : cache.resident_set()) {
    auto it = state.credit.find(o);
    sim[o] = it != state.credit.end() ? it->second
                                      : state.inflation + unit_credit(o, catalog);
  }
  Bytes used = cache.used();
  const Bytes capacity = cache.capacity();

  for (ObjectId c : batch) {
    if (sim.contains(c)) continue;
    const Bytes size = catalog.size_of(c);
    if (size > capacity) continue;
    const double candidate_credit = state.inflation + unit_credit(c, catalog);

    std::vector<std::pair<double, ObjectId>> order;
    order.reserve(sim.size());
    for (const auto& [o, h] : sim) order.emplace_back(h, o);
    std::sort(order.begin(), order.end());

    Bytes freed = 0;
    std::size_t victims = 0;
    while (used - freed + size > capacity && victims < order.size() &&
           order[victims].first <= candidate_credit) {
      freed += catalog.size_of(order[victims].second);
      ++victims;
    }
    if (used - freed + size > capacity) continue;  // refused

    for (std::size_t i = 0; i < victims; ++i) {
      state.inflation = std::max(state.inflation, order[i].first);
      sim.erase(order[i].second);
    }
    used = used - freed + size;
    sim[c] = state.inflation + unit_credit(c, catalog);
  }

  std::vector<Decision> decisions;
  for (ObjectId o : cache.resident_set()) {
    if (!sim.contains(o)) decisions.emplace_back(Evict{o});
  }
  std::set<ObjectId> emitted;
  for (ObjectId c : batch) {
    if (sim.contains(c) && !cache.resident(c) && emitted.insert(c).second) {
      decisions.emplace_back(Load{c});
    }
  }
  state.credit = std::move(sim);
  return {std::move(state), std::move(decisions)};
}

LoadManager::LoadManager(const ObjectCatalog& catalog, std::uint64_t seed)
    : catalog_(&catalog), rng_(seed) {}

void LoadManager::on_access(const Query& q, const CacheState& cache) {
  for (ObjectId o : q.objects) {
    if (cache.resident(o)) gds_ = gds_touch(std::move(gds_), o, *catalog_);
  }
}

std::vector<Decision> LoadManager::on_shipped_query(const Query& q, const CacheState& cache) {
  on_access(q, cache);
  const CandidacyBatch batch = offer(q, cache, *catalog_, rng_);
  if (batch.empty()) return {};
  auto [state, decisions] = gds_lazy_apply(std::move(gds_), cache, batch, *catalog_);
  gds_ = std::move(state);
  return decisions;
}

}  // namespace decouple
