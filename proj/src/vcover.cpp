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

#include "decouple/vcover.hpp"

#include <algorithm>
#include <sstream>

namespace decouple {

VCoverPolicy::VCoverPolicy(const ObjectCatalog& catalog, Bytes capacity, std::uint64_t seed)
    : catalog_(&catalog), cache_(capacity), loadmgr_(catalog, seed) {}

std::vector<Decision> VCoverPolicy::on_update(const Update& u) {
  cache_.receive(u);
  return {};
}

std::vector<Decision> VCoverPolicy::on_query(const Query& q) {
  if (cache_.all_resident(q.objects)) {
    loadmgr_.on_access(q, cache_);
    return update_manager(q);
  }

  std::vector<Decision> out;
  commit(ShipQuery{q.id, q.ship_cost}, out);
  for (const Decision& d : loadmgr_.on_shipped_query(q, cache_)) commit(d, out);
  return out;
}

std::vector<Decision> VCoverPolicy::update_manager(const Query& q) {
  std::vector<Decision> out;
  std::vector<Update> interacting = interacting_updates(q, cache_, q.time);

  // Free updates never need a decision.
  ShipUpdates free_updates;
  std::erase_if(interacting, [&](const Update& u) {
    if (u.ship_cost > 0) return false;
    free_updates.updates.push_back(u);
    return true;
  });
  if (!free_updates.updates.empty()) commit(free_updates, out);

  if (interacting.empty()) {
    commit(AnswerFromCache{q.id}, out);
    return out;
  }
  if (q.ship_cost == 0) {
    commit(ShipQuery{q.id, 0}, out);
    return out;
  }

  graph_.add_query(q.id, q.ship_cost);
  for (const Update& u : interacting) {
    if (!graph_.has_update(u.id)) {
      graph_.add_update(u.id, u.ship_cost);
      graph_updates_.emplace(u.id, u);
    }
    graph_.add_edge(u.id, q.id);
  }

  const CoverResult cover = graph_.min_weight_cover();

  // Every update picked by the cover is shipped and leaves the graph.
  if (!cover.updates.empty()) {
    ShipUpdates ship;
    for (UpdateId id : cover.updates) ship.updates.push_back(graph_updates_.at(id));
    commit(ship, out);
  }
  if (cover.covers(q.id)) {
    commit(ShipQuery{q.id, q.ship_cost}, out);
  } else {
    commit(AnswerFromCache{q.id}, out);
  }

  prune_remainder(graph_, cover);
  for (UpdateId id : cover.updates) graph_updates_.erase(id);
  return out;
}

void VCoverPolicy::commit(const Decision& d, std::vector<Decision>& out) {
  if (const auto* evict = std::get_if<Evict>(&d)) {
    for (const Update& u : cache_.outstanding(evict->object)) {
      if (!graph_.has_update(u.id)) continue;
      graph_.remove_update(u.id);
      graph_updates_.erase(u.id);
    }
    loadmgr_.forget(evict->object);
  }
  cache_.apply(d, *catalog_);
  out.push_back(d);
}

void VCoverPolicy::check_invariants() const {
  cache_.check_invariants(*catalog_);
  graph_.check_flow();
  if (graph_.update_count() != graph_updates_.size()) {
    throw Error("vcover: graph update index out of sync");
  }
  for (const auto& [id, u] : graph_updates_) {
    const auto queue = cache_.outstanding(u.object);
    const bool outstanding = std::any_of(queue.begin(), queue.end(),
                                         [&](const Update& x) { return x.id == id; });
    if (!outstanding || !graph_.has_update(id)) {
      std::ostringstream msg;
      msg << "vcover: graph holds update " << id << " that is not outstanding";
      throw Error(msg.str());
    }
  }
}

}  // namespace decouple
