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

#include "decouple/covergraph.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <sstream>
#include <variant>

namespace decouple {

namespace {

template <class... Parts>
[[noreturn]] void fail(const Parts&... parts) {
  std::ostringstream msg;
  (msg << ... << parts);
  throw GraphError(msg.str());
}

// Residual-network search state. An update's parent is the query it was
// reached from over a reversed edge, or nothing when reached from the source.
struct Search {
  std::map<UpdateId, std::optional<QueryId>> update_parent;
  std::map<QueryId, UpdateId> query_parent;
};

}  // namespace

void InteractionGraph::add_query(QueryId q, Bytes weight) {
  if (weight <= 0) fail("query ", q, ": weight must be positive");
  if (!queries_.try_emplace(q, QueryNode{weight, 0, {}}).second) fail("duplicate query node ", q);
  total_weight_ += weight;
}

void InteractionGraph::add_update(UpdateId u, Bytes weight) {
  if (weight <= 0) fail("update ", u, ": weight must be positive");
  if (!updates_.try_emplace(u, UpdateNode{weight, 0, {}}).second) fail("duplicate update node ", u);
  total_weight_ += weight;
}

void InteractionGraph::add_edge(UpdateId u, QueryId q) {
  auto uit = updates_.find(u);
  auto qit = queries_.find(q);
  if (uit == updates_.end() || qit == queries_.end()) {
    fail("dangling edge (", u, ", ", q, ")");
  }
  if (!uit->second.edges.try_emplace(q, 0).second) return;
  qit->second.edges.emplace(u, 0);
  ++edge_count_;
}

bool InteractionGraph::has_edge(UpdateId u, QueryId q) const {
  auto it = updates_.find(u);
  return it != updates_.end() && it->second.edges.contains(q);
}

Bytes InteractionGraph::query_weight(QueryId q) const {
  auto it = queries_.find(q);
  if (it == queries_.end()) fail("unknown query node ", q);
  return it->second.weight;
}

Bytes InteractionGraph::update_weight(UpdateId u) const {
  auto it = updates_.find(u);
  if (it == updates_.end()) fail("unknown update node ", u);
  return it->second.weight;
}

void InteractionGraph::remove_update(UpdateId u) {
  auto it = updates_.find(u);
  if (it == updates_.end()) throw GraphError("no update " + std::to_string(u.value));
  for (const auto& [q, f] : it->second.edges) {
    QueryNode& qn = queries_.at(q);
    qn.flow -= f;
    qn.edges.erase(u);
    --edge_count_;
  }
  flow_value_ -= it->second.flow;
  total_weight_ -= it->second.weight;
  updates_.erase(it);
}

void InteractionGraph::remove_query(QueryId q) {
  auto it = queries_.find(q);
  if (it == queries_.end()) throw GraphError("no query " + std::to_string(q.value));
  for (const auto& [u, f] : it->second.edges) {
    UpdateNode& un = updates_.at(u);
    un.flow -= f;
    un.edges.erase(q);
    --edge_count_;
  }
  flow_value_ -= it->second.flow;
  total_weight_ -= it->second.weight;
  queries_.erase(it);
}

void InteractionGraph::reset_flow() {
  for (auto& [u, n] : updates_) {
    n.flow = 0;
    for (auto& [q, f] : n.edges) f = 0;
  }
  for (auto& [q, n] : queries_) {
    n.flow = 0;
    for (auto& [u, f] : n.edges) f = 0;
  }
  flow_value_ = 0;
}

bool InteractionGraph::augment_once() {
  Search s;
  std::deque<std::variant<UpdateId, QueryId>> frontier;
  for (const auto& [u, n] : updates_) {
    if (n.flow < n.weight) {
      s.update_parent.emplace(u, std::nullopt);
      frontier.emplace_back(u);
    }
  }

  std::optional<QueryId> target;
  while (!frontier.empty() && !target) {
    const auto node = frontier.front();
    frontier.pop_front();
    if (const auto* u = std::get_if<UpdateId>(&node)) {
      for (const auto& [q, f] : updates_.at(*u).edges) {
        if (!s.query_parent.try_emplace(q, *u).second) continue;
        const QueryNode& qn = queries_.at(q);
        if (qn.flow < qn.weight) {
          target = q;
          break;
        }
        frontier.emplace_back(q);
      }
    } else {
      const QueryId q = std::get<QueryId>(node);
      for (const auto& [u, f] : queries_.at(q).edges) {
        if (f > 0 && s.update_parent.try_emplace(u, q).second) frontier.emplace_back(u);
      }
    }
  }
  if (!target) return false;

  // Bottleneck along sink <- query <- update (<- query <- update)* <- source.
  Bytes bottleneck = queries_.at(*target).weight - queries_.at(*target).flow;
  QueryId q = *target;
  for (;;) {
    const UpdateId u = s.query_parent.at(q);
    const auto& parent = s.update_parent.at(u);
    if (!parent) {
      const UpdateNode& un = updates_.at(u);
      bottleneck = std::min(bottleneck, un.weight - un.flow);
      break;
    }
    bottleneck = std::min(bottleneck, updates_.at(u).edges.at(*parent));
    q = *parent;
  }

  queries_.at(*target).flow += bottleneck;
  q = *target;
  for (;;) {
    const UpdateId u = s.query_parent.at(q);
    UpdateNode& un = updates_.at(u);
    un.edges.at(q) += bottleneck;
    queries_.at(q).edges.at(u) += bottleneck;
    const auto& parent = s.update_parent.at(u);
    if (!parent) {
      un.flow += bottleneck;
      break;
    }
    un.edges.at(*parent) -= bottleneck;
    queries_.at(*parent).edges.at(u) -= bottleneck;
    q = *parent;
  }
  flow_value_ += bottleneck;
  ++augmentations_;
  return true;
}

CoverResult InteractionGraph::min_weight_cover() {
  while (augment_once()) {
  }

  // Source side of the minimum cut.
  std::set<UpdateId> reached_updates;
  std::set<QueryId> reached_queries;
  std::deque<std::variant<UpdateId, QueryId>> frontier;
  for (const auto& [u, n] : updates_) {
    if (n.flow < n.weight) {
      reached_updates.insert(u);
      frontier.emplace_back(u);
    }
  }
  while (!frontier.empty()) {
    const auto node = frontier.front();
    frontier.pop_front();
    if (const auto* u = std::get_if<UpdateId>(&node)) {
      for (const auto& [q, f] : updates_.at(*u).edges) {
        if (reached_queries.insert(q).second) frontier.emplace_back(q);
      }
    } else {
      for (const auto& [u, f] : queries_.at(std::get<QueryId>(node)).edges) {
        if (f > 0 && reached_updates.insert(u).second) frontier.emplace_back(u);
      }
    }
  }

  CoverResult cover;
  for (const auto& [u, n] : updates_) {
    if (!reached_updates.contains(u)) {
      cover.updates.insert(u);
      cover.weight += n.weight;
    }
  }
  for (QueryId q : reached_queries) {
    cover.queries.insert(q);
    cover.weight += queries_.at(q).weight;
  }
  if (cover.weight != flow_value_) {
    fail("cut weight ", cover.weight, " differs from flow value ", flow_value_);
  }
  return cover;
}

void InteractionGraph::check_flow() const {
  Bytes source_out = 0;
  Bytes sink_in = 0;
  for (const auto& [u, n] : updates_) {
    if (n.flow < 0 || n.flow > n.weight) fail("capacity violated at update ", u);
    Bytes out = 0;
    for (const auto& [q, f] : n.edges) {
      if (f < 0 || f > unbounded()) fail("capacity violated on edge (", u, ", ", q, ")");
      const auto qit = queries_.find(q);
      if (qit == queries_.end() || qit->second.edges.at(u) != f) {
        fail("edge (", u, ", ", q, ") not mirrored");
      }
      out += f;
    }
    if (out != n.flow) fail("conservation violated at update ", u);
    source_out += n.flow;
  }
  for (const auto& [q, n] : queries_) {
    if (n.flow < 0 || n.flow > n.weight) fail("capacity violated at query ", q);
    Bytes in = 0;
    for (const auto& [u, f] : n.edges) in += f;
    if (in != n.flow) fail("conservation violated at query ", q);
    sink_in += n.flow;
  }
  if (source_out != flow_value_ || sink_in != flow_value_) fail("flow value drift");
}

std::string InteractionGraph::dump() const {
  std::ostringstream os;
  os << "interaction-graph v1\n";
  os << "updates " << updates_.size() << " queries " << queries_.size() << " edges "
     << edge_count_ << " flow " << flow_value_ << '\n';
  for (const auto& [u, n] : updates_) {
    os << "u " << u << " weight " << n.weight << " flow " << n.flow << '\n';
  }
  for (const auto& [q, n] : queries_) {
    os << "q " << q << " weight " << n.weight << " flow " << n.flow << '\n';
  }
  for (const auto& [u, n] : updates_) {
    for (const auto& [q, f] : n.edges) os << "e " << u << ' ' << q << " flow " << f << '\n';
  }
  return os.str();
}

CoverResult min_weight_cover_from_scratch(const InteractionGraph& g,
                                          std::uint64_t* augmentations) {
  InteractionGraph copy = g;
  copy.reset_flow();
  const std::uint64_t before = copy.augmentations();
  CoverResult cover = copy.min_weight_cover();
  if (augmentations) *augmentations = copy.augmentations() - before;
  return cover;
}

void prune_remainder(InteractionGraph& g, const CoverResult& cover) {
  for (UpdateId u : cover.updates) g.remove_update(u);
  for (QueryId q : g.query_ids()) {
    if (!cover.covers(q)) g.remove_query(q);
  }
}

std::vector<QueryId> InteractionGraph::query_ids() const {
  std::vector<QueryId> out;
  out.reserve(queries_.size());
  for (const auto& [q, n] : queries_) out.push_back(q);
  return out;
}

std::vector<UpdateId> InteractionGraph::update_ids() const {
  std::vector<UpdateId> out;
  out.reserve(updates_.size());
  for (const auto& [u, n] : updates_) out.push_back(u);
  return out;
}

std::vector<QueryId> InteractionGraph::neighbours(UpdateId u) const {
  std::vector<QueryId> out;
  auto it = updates_.find(u);
  if (it == updates_.end()) return out;
  for (const auto& [q, f] : it->second.edges) out.push_back(q);
  return out;
}

}  // namespace decouple
