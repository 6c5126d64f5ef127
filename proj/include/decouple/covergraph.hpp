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
 * @file covergraph.hpp
 * @brief Weighted bipartite query/update interaction graph and its
 *        minimum-weight vertex cover.
 *
 * The cover is obtained from a maximum flow in the network
 *
 *     source -> update (capacity = update weight)
 *     update -> query  (unbounded)
 *     query  -> sink   (capacity = query weight)
 *
 * and a minimum cut: updates unreachable from the source in the residual
 * network together with queries reachable from it form the cover.
 *
 * The graph carries its flow. Adding nodes or edges leaves the current flow
 * valid, so the next cover computation only searches for the augmenting
 * paths the change opened up (shortest paths first, as in Edmonds-Karp).
 */

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "decouple/types.hpp"

namespace decouple {

class GraphError : public Error {
 public:
  using Error::Error;
};

struct CoverResult {
  std::set<QueryId> queries;
  std::set<UpdateId> updates;
  Bytes weight = 0;

  bool covers(QueryId q) const { return queries.contains(q); }
  bool covers(UpdateId u) const { return updates.contains(u); }
};

class InteractionGraph {
 public:
  void add_query(QueryId q, Bytes weight);
  void add_update(UpdateId u, Bytes weight);
  void add_edge(UpdateId u, QueryId q);

  /// Removes a node and cancels the flow routed through it, so the
  /// remaining flow stays valid. Throws GraphError if the node is absent.
  void remove_update(UpdateId u);
  void remove_query(QueryId q);

  bool has_query(QueryId q) const { return queries_.contains(q); }
  bool has_update(UpdateId u) const { return updates_.contains(u); }
  bool has_edge(UpdateId u, QueryId q) const;

  std::size_t query_count() const { return queries_.size(); }
  std::size_t update_count() const { return updates_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool empty() const { return queries_.empty() && updates_.empty(); }

  std::vector<QueryId> query_ids() const;
  std::vector<UpdateId> update_ids() const;
  std::vector<QueryId> neighbours(UpdateId u) const;

  Bytes query_weight(QueryId q) const;
  Bytes update_weight(UpdateId u) const;

  /// Value of the flow currently held by the graph.
  Bytes flow_value() const { return flow_value_; }

  /**
   * Augments the held flow to a maximum flow and returns the minimum-weight
   * vertex cover read off the source side of the minimum cut. Among
   * equal-weight covers this picks the one covering the most updates.
   */
  CoverResult min_weight_cover();

  /// Drops all flow (a from-scratch computation starts from here).
  void reset_flow();

  /// Augmenting paths found over the graph's lifetime.
  std::uint64_t augmentations() const { return augmentations_; }

  /// Throws GraphError if the held flow breaks a capacity or conservation
  /// constraint.
  void check_flow() const;

  /// Deterministic text form of the nodes, edges and flow, sorted by id.
  std::string dump() const;

 private:
  struct UpdateNode {
    Bytes weight = 0;
    Bytes flow = 0;                   // source -> update
    std::map<QueryId, Bytes> edges;   // update -> query flow
  };
  struct QueryNode {
    Bytes weight = 0;
    Bytes flow = 0;                   // query -> sink
    std::map<UpdateId, Bytes> edges;  // mirrors UpdateNode::edges
  };

  bool augment_once();
  Bytes unbounded() const { return total_weight_ + 1; }

  std::map<UpdateId, UpdateNode> updates_;
  std::map<QueryId, QueryNode> queries_;
  std::size_t edge_count_ = 0;
  Bytes total_weight_ = 0;
  Bytes flow_value_ = 0;
  std::uint64_t augmentations_ = 0;
};

/// Computes a cover of a copy of `g` starting from zero flow.
CoverResult min_weight_cover_from_scratch(const InteractionGraph& g,
                                          std::uint64_t* augmentations = nullptr);

/**
 * Reduces `g` to its remainder: updates outside the cover and queries inside
 * it survive, together with the edges among them. The flow restricted to the
 * survivors remains a maximum flow.
 */
void prune_remainder(InteractionGraph& g, const CoverResult& cover);

}  // namespace decouple
