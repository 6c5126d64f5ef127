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

#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "decouple/covergraph.hpp"
#include "oracles/oracles.hpp"

using namespace decouple;

namespace {

// Builds an interaction graph and the oracle's plain-list view of it.
struct Pair {
  InteractionGraph graph;
  oracle::SmallGraph plain;
};

Pair random_graph(std::mt19937_64& rng, std::size_t max_side, Bytes max_weight) {
  std::uniform_int_distribution<std::size_t> side(0, max_side);
  std::uniform_int_distribution<Bytes> weight(1, max_weight);
  std::bernoulli_distribution edge(0.5);
  Pair p;
  const std::size_t nu = side(rng);
  const std::size_t nq = side(rng);
  for (std::size_t i = 0; i < nu; ++i) {
    const Bytes w = weight(rng);
    p.graph.add_update(UpdateId{i}, w);
    p.plain.update_weights.push_back(w);
  }
  for (std::size_t j = 0; j < nq; ++j) {
    const Bytes w = weight(rng);
    p.graph.add_query(QueryId{j}, w);
    p.plain.query_weights.push_back(w);
  }
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 0; j < nq; ++j) {
      if (edge(rng)) {
        p.graph.add_edge(UpdateId{i}, QueryId{j});
        p.plain.edges.emplace_back(i, j);
      }
    }
  }
  return p;
}

std::set<std::size_t> indices(const std::set<UpdateId>& s) {
  std::set<std::size_t> out;
  for (UpdateId u : s) out.insert(u.value);
  return out;
}

std::set<std::size_t> indices(const std::set<QueryId>& s) {
  std::set<std::size_t> out;
  for (QueryId q : s) out.insert(q.value);
  return out;
}

}  // namespace

TEST_SUITE("covergraph") {

TEST_CASE("adding a query to an empty graph") {
  InteractionGraph g;
  g.add_query(QueryId{1}, 5);
  CHECK(g.query_count() == 1);
  CHECK(g.edge_count() == 0);
  CHECK(g.min_weight_cover().weight == 0);
}

TEST_CASE("empty graph has an empty cover") {
  InteractionGraph g;
  const CoverResult c = g.min_weight_cover();
  CHECK(c.weight == 0);
  CHECK(c.queries.empty());
  CHECK(c.updates.empty());
}

TEST_CASE("malformed mutations are rejected") {
  InteractionGraph g;
  g.add_query(QueryId{1}, 5);
  g.add_update(UpdateId{1}, 2);
  CHECK_THROWS_AS(g.add_query(QueryId{1}, 3), GraphError);
  CHECK_THROWS_AS(g.add_update(UpdateId{2}, 0), GraphError);
  CHECK_THROWS_AS(g.add_edge(UpdateId{9}, QueryId{1}), GraphError);
  CHECK_THROWS_AS(g.add_edge(UpdateId{1}, QueryId{9}), GraphError);
  CHECK_THROWS_AS(g.remove_update(UpdateId{9}), GraphError);
  g.add_edge(UpdateId{1}, QueryId{1});
  g.add_edge(UpdateId{1}, QueryId{1});
  CHECK(g.edge_count() == 1);
}

TEST_CASE("shared-object subgraph: two updates against one query") {
  // q7 reads o2, which carries u1 (1 GB) and u6 (10 GB); q7 costs 9 GB.
  InteractionGraph g;
  g.add_update(UpdateId{1}, 1 * kGB);
  g.add_update(UpdateId{6}, 10 * kGB);
  g.add_query(QueryId{7}, 9 * kGB);
  g.add_edge(UpdateId{1}, QueryId{7});
  g.add_edge(UpdateId{6}, QueryId{7});
  CHECK(g.neighbours(UpdateId{1}) == std::vector<QueryId>{QueryId{7}});
  const CoverResult c = g.min_weight_cover();
  CHECK(c.weight == 9 * kGB);
  CHECK(c.covers(QueryId{7}));
  CHECK(c.updates.empty());
}

TEST_CASE("the lighter side of a single edge is covered") {
  InteractionGraph g;
  g.add_update(UpdateId{1}, 7);
  g.add_query(QueryId{1}, 3);
  g.add_edge(UpdateId{1}, QueryId{1});
  CoverResult c = g.min_weight_cover();
  CHECK(c.covers(QueryId{1}));
  CHECK_FALSE(c.covers(UpdateId{1}));
}

TEST_CASE("ties are broken towards covering updates") {
  InteractionGraph g;
  g.add_update(UpdateId{1}, 4);
  g.add_query(QueryId{1}, 4);
  g.add_edge(UpdateId{1}, QueryId{1});
  const CoverResult c = g.min_weight_cover();
  CHECK(c.covers(UpdateId{1}));
  CHECK_FALSE(c.covers(QueryId{1}));
}

TEST_CASE("repeated queries flip the cover towards the updates") {
  InteractionGraph g;
  g.add_update(UpdateId{1}, 1);
  g.add_update(UpdateId{6}, 10);
  g.add_query(QueryId{1}, 9);
  g.add_edge(UpdateId{1}, QueryId{1});
  g.add_edge(UpdateId{6}, QueryId{1});
  CoverResult c = g.min_weight_cover();
  CHECK(c.covers(QueryId{1}));
  prune_remainder(g, c);
  CHECK(g.has_query(QueryId{1}));  // shipped queries stay as pressure
  g.add_query(QueryId{2}, 9);
  g.add_edge(UpdateId{1}, QueryId{2});
  g.add_edge(UpdateId{6}, QueryId{2});
  c = g.min_weight_cover();
  CHECK(c.weight == 11);
  CHECK(c.covers(UpdateId{1}));
  CHECK(c.covers(UpdateId{6}));
}

TEST_CASE("prune keeps uncovered updates and covered queries") {
  InteractionGraph g;
  g.add_update(UpdateId{1}, 1);
  g.add_update(UpdateId{2}, 50);
  g.add_query(QueryId{1}, 10);
  g.add_query(QueryId{2}, 10);
  g.add_edge(UpdateId{1}, QueryId{1});
  g.add_edge(UpdateId{2}, QueryId{2});
  const CoverResult c = g.min_weight_cover();
  CHECK(c.covers(UpdateId{1}));
  CHECK(c.covers(QueryId{2}));
  prune_remainder(g, c);
  CHECK_FALSE(g.has_update(UpdateId{1}));
  CHECK(g.has_update(UpdateId{2}));
  CHECK_FALSE(g.has_query(QueryId{1}));
  CHECK(g.has_query(QueryId{2}));
  CHECK(g.has_edge(UpdateId{2}, QueryId{2}));
  CHECK(g.query_weight(QueryId{2}) == 10);
  g.check_flow();
}

TEST_CASE("cover of all updates leaves no update nodes") {
  InteractionGraph g;
  for (std::uint64_t i = 0; i < 3; ++i) {
    g.add_update(UpdateId{i}, 1);
    g.add_query(QueryId{i}, 5);
    g.add_edge(UpdateId{i}, QueryId{i});
  }
  prune_remainder(g, g.min_weight_cover());
  CHECK(g.update_count() == 0);
}

TEST_CASE("prune matches a set-algebra re-filter on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Pair p = random_graph(rng, 3, 10);
    const CoverResult c = p.graph.min_weight_cover();
    std::set<std::size_t> keep_u;
    std::set<std::size_t> keep_q;
    for (std::size_t i = 0; i < p.plain.update_weights.size(); ++i) {
      if (!c.covers(UpdateId{i})) keep_u.insert(i);
    }
    for (std::size_t j = 0; j < p.plain.query_weights.size(); ++j) {
      if (c.covers(QueryId{j})) keep_q.insert(j);
    }
    prune_remainder(p.graph, c);
    std::set<std::size_t> got_u;
    std::set<std::size_t> got_q;
    for (UpdateId u : p.graph.update_ids()) got_u.insert(u.value);
    for (QueryId q : p.graph.query_ids()) got_q.insert(q.value);
    CHECK(got_u == keep_u);
    CHECK(got_q == keep_q);
    std::size_t edges = 0;
    for (const auto& [u, q] : p.plain.edges) edges += keep_u.contains(u) && keep_q.contains(q);
    CHECK(p.graph.edge_count() == edges);
    p.graph.check_flow();
  }
}

TEST_CASE("random adds match a naive adjacency replay") {
  std::mt19937_64 rng(5);
  InteractionGraph g;
  std::map<std::uint64_t, std::set<std::uint64_t>> adjacency;
  std::set<std::uint64_t> queries;
  std::uniform_int_distribution<int> op(0, 2);
  std::uniform_int_distribution<std::uint64_t> id(0, 5);
  for (int step = 0; step < 20; ++step) {
    const std::uint64_t a = id(rng);
    const std::uint64_t b = id(rng);
    switch (op(rng)) {
      case 0:
        if (!adjacency.contains(a)) {
          g.add_update(UpdateId{a}, 3);
          adjacency[a];
        }
        break;
      case 1:
        if (!queries.contains(b)) {
          g.add_query(QueryId{b}, 3);
          queries.insert(b);
        }
        break;
      default:
        if (adjacency.contains(a) && queries.contains(b)) {
          g.add_edge(UpdateId{a}, QueryId{b});
          adjacency[a].insert(b);
        }
    }
  }
  std::size_t edges = 0;
  for (const auto& [u, qs] : adjacency) edges += qs.size();
  CHECK(g.update_count() == adjacency.size());
  CHECK(g.query_count() == queries.size());
  CHECK(g.edge_count() == edges);
}

TEST_CASE("cover weight equals brute force on small random graphs") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    Pair p = random_graph(rng, 4, 10);
    const CoverResult c = p.graph.min_weight_cover();
    CHECK(c.weight == oracle::brute_force_cover(p.plain));
    CHECK(oracle::is_cover(p.plain, indices(c.updates), indices(c.queries)));
  }
}

TEST_CASE("removing an update cancels its flow") {
  InteractionGraph g;
  g.add_update(UpdateId{1}, 5);
  g.add_update(UpdateId{2}, 5);
  g.add_query(QueryId{1}, 8);
  g.add_edge(UpdateId{1}, QueryId{1});
  g.add_edge(UpdateId{2}, QueryId{1});
  CHECK(g.min_weight_cover().weight == 8);
  g.remove_update(UpdateId{1});
  g.check_flow();
  CHECK(g.min_weight_cover().weight == 5);
  CHECK(min_weight_cover_from_scratch(g).weight == 5);
}

TEST_CASE("incremental augmentation reuses the held flow") {
  InteractionGraph g;
  g.add_update(UpdateId{1}, 3);
  g.add_query(QueryId{1}, 4);
  g.add_edge(UpdateId{1}, QueryId{1});
  g.min_weight_cover();
  const auto before = g.augmentations();
  CHECK(g.min_weight_cover().weight == 3);
  CHECK(g.augmentations() == before);
}

TEST_CASE("dump is deterministic and sorted") {
  InteractionGraph a;
  a.add_query(QueryId{2}, 1);
  a.add_query(QueryId{1}, 1);
  a.add_update(UpdateId{1}, 1);
  a.add_edge(UpdateId{1}, QueryId{2});
  InteractionGraph b;
  b.add_update(UpdateId{1}, 1);
  b.add_query(QueryId{1}, 1);
  b.add_query(QueryId{2}, 1);
  b.add_edge(UpdateId{1}, QueryId{2});
  CHECK(a.dump() == b.dump());
  CHECK(a.dump().rfind("interaction-graph v1", 0) == 0);
}

}  // TEST_SUITE
