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

#include "decouple/cache.hpp"

#include <algorithm>
#include <sstream>

namespace decouple {

namespace {

template <class... Parts>
[[noreturn]] void fail(const Parts&... parts) {
  std::ostringstream msg;
  (msg << ... << parts);
  throw CacheError(msg.str());
}

}  // namespace

CacheState::CacheState(Bytes capacity) : capacity_(capacity) {
  if (capacity < 0) fail("negative cache capacity");
}

bool CacheState::all_resident(std::span<const ObjectId> objects) const {
  return std::all_of(objects.begin(), objects.end(),
                     [this](ObjectId o) { return resident(o); });
}

Freshness CacheState::freshness(ObjectId o) const {
  if (!resident(o)) fail("object ", o, " is not resident");
  return outstanding_.contains(o) ? Freshness::stale : Freshness::fresh;
}

std::span<const Update> CacheState::outstanding(ObjectId o) const {
  auto it = outstanding_.find(o);
  if (it == outstanding_.end()) return {};
  return it->second;
}

bool CacheState::receive(const Update& u) {
  if (!resident(u.object)) return false;
  outstanding_[u.object].push_back(u);
  return true;
}

void CacheState::seed(ObjectId o, const ObjectCatalog& catalog) {
  apply(Load{o}, catalog);
}

void CacheState::apply(const Decision& d, const ObjectCatalog& catalog) {
  if (const auto* load = std::get_if<Load>(&d)) {
    const ObjectId o = load->object;
    if (!catalog.contains(o)) fail("load of unknown object ", o);
    if (resident(o)) fail("load of resident object ", o);
    const Bytes size = catalog.size_of(o);
    if (size > free_space()) {
      fail("loading object ", o, " (", size, " bytes) exceeds capacity: ", used_,
           " of ", capacity_, " bytes used");
    }
    resident_.insert(o);
    used_ += size;
    outstanding_.erase(o);
  } else if (const auto* evict = std::get_if<Evict>(&d)) {
    const ObjectId o = evict->object;
    if (!catalog.contains(o)) fail("eviction of unknown object ", o);
    if (!resident(o)) fail("eviction of non-resident object ", o);
    resident_.erase(o);
    used_ -= catalog.size_of(o);
    outstanding_.erase(o);
  } else if (const auto* ship = std::get_if<ShipUpdates>(&d)) {
    for (const Update& u : ship->updates) {
      auto it = outstanding_.find(u.object);
      if (it == outstanding_.end()) fail("update ", u.id, " is not outstanding");
      auto& queue = it->second;
      auto pos = std::find_if(queue.begin(), queue.end(),
                              [&u](const Update& x) { return x.id == u.id; });
      if (pos == queue.end()) fail("update ", u.id, " is not outstanding");
      queue.erase(pos);
      if (queue.empty()) outstanding_.erase(it);
    }
  }
}

void CacheState::check_invariants(const ObjectCatalog& catalog) const {
  Bytes sum = 0;
  for (ObjectId o : resident_) sum += catalog.size_of(o);
  if (sum != used_) fail("occupancy drift: tracked ", used_, ", actual ", sum);
  if (used_ > capacity_) fail("occupancy ", used_, " exceeds capacity ", capacity_);
  for (const auto& [o, queue] : outstanding_) {
    if (!resident(o)) fail("non-resident object ", o, " carries outstanding updates");
    if (queue.empty()) fail("empty outstanding list kept for object ", o);
  }
}

std::vector<Update> interacting_updates(const Query& q, const CacheState& cache,
                                        Micros now) {
  const Micros horizon = now - q.tolerance;
  std::vector<Update> out;
  for (ObjectId o : q.objects) {
    if (!cache.resident(o)) fail("query ", q.id, " accesses non-resident object ", o);
    for (const Update& u : cache.outstanding(o)) {
      if (u.time <= horizon) out.push_back(u);
    }
  }
  return out;
}

Bytes traffic_of(const Decision& d, const ObjectCatalog& catalog) {
  if (const auto* sq = std::get_if<ShipQuery>(&d)) return sq->cost;
  if (const auto* su = std::get_if<ShipUpdates>(&d)) {
    Bytes sum = 0;
    for (const Update& u : su->updates) sum += u.ship_cost;
    return sum;
  }
  if (const auto* load = std::get_if<Load>(&d)) return catalog.load_cost(load->object);
  return 0;
}

Bytes TrafficLedger::record(const Decision& d, const ObjectCatalog& catalog,
                            std::uint64_t seq) {
  const Bytes bytes = traffic_of(d, catalog);
  if (std::holds_alternative<ShipQuery>(d)) {
    query_ship_ += bytes;
  } else if (std::holds_alternative<ShipUpdates>(d)) {
    update_ship_ += bytes;
  } else if (std::holds_alternative<Load>(d)) {
    load_ += bytes;
  } else {
    return 0;
  }
  samples_.push_back({seq, total()});
  return bytes;
}

}  // namespace decouple
