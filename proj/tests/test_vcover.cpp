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

#include <algorithm>

#include "decouple/simharness.hpp"
#include "decouple/vcover.hpp"
#include "decouple/workload.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace decouple;
using decouple::testing::catalog_of;
using decouple::testing::TraceBuilder;

namespace {

template <class T>
bool has(const std::vector<Decision>& ds) {
  return std::any_of(ds.begin(), ds.end(), [](const Decision& d) {
    return std::holds_alternative<T>(d);
  });
}

Query make_query(std::uint64_t id, Micros t, std::vector<std::uint64_t> objects, Bytes cost,
                 Micros tolerance = 0) {
  return TraceBuilder().query(id, t, std::move(objects), cost, tolerance).build()[0].query();
}

}  // namespace

TEST_SUITE("vcover") {

TEST_CASE("fresh resident objects answer at the cache") {
  const auto cat = catalog_of({10});
  VCoverPolicy p(cat, 10, 1);
  p.seed(ObjectId{1});
  const auto ds = p.on_query(make_query(1, 0, {1}, 5));
  REQUIRE(ds.size() == 1);
  CHECK(ds[0] == Decision{AnswerFromCache{QueryId{1}}});
}

TEST_CASE("a query touching a missing object is shipped") {
  const auto cat = catalog_of({10 * kGB, 10 * kGB, 12 * kGB, 10 * kGB});
  VCoverPolicy p(cat, 32 * kGB, 1);
  for (std::uint64_t o : {1, 2, 3}) p.seed(ObjectId{o});
  const auto ds = p.on_query(make_query(3, 3, {1, 2, 4}, 15 * kGB));
  REQUIRE_FALSE(ds.empty());
  CHECK(ds[0] == Decision{ShipQuery{QueryId{3}, 15 * kGB}});
  // 15 GB of credit covers o4's 10 GB load cost, so o4 must be nominated.
  CHECK(has<Load>(ds));
  CHECK(p.cache().resident(ObjectId{4}));
  CHECK(has<Evict>(ds));
  CHECK(p.cache().used() <= 32 * kGB);
}

TEST_CASE("an expensive update makes the query ship") {
  const auto cat = catalog_of({10});
  VCoverPolicy p(cat, 10, 1);
  p.seed(ObjectId{1});
  CHECK(p.on_update(Update{UpdateId{1}, 1, ObjectId{1}, 8}).empty());
  const auto ds = p.on_query(make_query(1, 2, {1}, 3));
  REQUIRE(ds.size() == 1);
  CHECK(ds[0] == Decision{ShipQuery{QueryId{1}, 3}});
  CHECK(p.graph().has_query(QueryId{1}));
  CHECK(p.graph().has_update(UpdateId{1}));
  p.check_invariants();
}

TEST_CASE("a cheap update is shipped and the query answered") {
  const auto cat = catalog_of({10});
  VCoverPolicy p(cat, 10, 1);
  p.seed(ObjectId{1});
  p.on_update(Update{UpdateId{1}, 1, ObjectId{1}, 2});
  const auto ds = p.on_query(make_query(1, 2, {1}, 3));
  REQUIRE(ds.size() == 2);
  CHECK(std::holds_alternative<ShipUpdates>(ds[0]));
  CHECK(ds[1] == Decision{AnswerFromCache{QueryId{1}}});
  CHECK(p.graph().empty());
}

TEST_CASE("updates within the tolerance do not interact") {
  const auto cat = catalog_of({10});
  VCoverPolicy p(cat, 10, 1);
  p.seed(ObjectId{1});
  p.on_update(Update{UpdateId{1}, 96, ObjectId{1}, 50});
  const auto ds = p.on_query(make_query(1, 100, {1}, 3, 10));
  REQUIRE(ds.size() == 1);
  CHECK(ds[0] == Decision{AnswerFromCache{QueryId{1}}});
}

TEST_CASE("repeated queries eventually pay for the updates") {
  // o1 carries u1 (1) and u6 (10); each query costs 9.
  const auto cat = catalog_of({10});
  const Trace trace = TraceBuilder()
                          .update(1, 1, 1, 1)
                          .update(6, 2, 1, 10)
                          .query(1, 3, {1}, 9)
                          .query(2, 4, {1}, 9)
                          .build();
  VCoverPolicy p(cat, 10, 1);
  p.seed(ObjectId{1});
  p.on_update(trace[0].update());
  p.on_update(trace[1].update());
  const auto first = p.on_query(trace[2].query());
  REQUIRE(first.size() == 1);
  CHECK(first[0] == Decision{ShipQuery{QueryId{1}, 9}});
  const auto second = p.on_query(trace[3].query());
  REQUIRE(second.size() == 2);
  CHECK(std::get<ShipUpdates>(second[0]).updates.size() == 2);
  CHECK(second[1] == Decision{AnswerFromCache{QueryId{2}}});
  CHECK(p.graph().empty());
  // Hindsight reloads the object once (10) instead of paying 20.
  CHECK(oracle::best_offline_plan(cat, trace, 10, {ObjectId{1}}) == 10);
}

TEST_CASE("updates to objects outside the cache cost nothing") {
  const auto cat = catalog_of({10, 10});
  VCoverPolicy p(cat, 10, 1);
  CHECK(p.on_update(Update{UpdateId{4}, 4, ObjectId{2}, 1}).empty());
  CHECK(p.cache().outstanding(ObjectId{2}).empty());
}

TEST_CASE("loading clears earlier updates") {
  const auto cat = catalog_of({10});
  VCoverPolicy p(cat, 10, 1);
  for (std::uint64_t i = 1; i <= 10; ++i) p.on_update(Update{UpdateId{i}, 1, ObjectId{1}, 1});
  const auto ds = p.on_query(make_query(1, 2, {1}, 10));
  CHECK(has<Load>(ds));
  CHECK(p.cache().freshness(ObjectId{1}) == Freshness::fresh);
  CHECK(p.cache().outstanding(ObjectId{1}).empty());
}

TEST_CASE("eviction drops the evicted object's updates from the graph") {
  const auto cat = catalog_of({10, 10});
  VCoverPolicy p(cat, 10, 1);
  p.seed(ObjectId{1});
  p.on_update(Update{UpdateId{1}, 1, ObjectId{1}, 50});
  p.on_query(make_query(1, 2, {1}, 3));
  REQUIRE(p.graph().has_update(UpdateId{1}));
  // Object 2 costs 10 to load; a 10-byte query nominates it and forces o1 out.
  const auto ds = p.on_query(make_query(2, 3, {2}, 10));
  CHECK(has<Evict>(ds));
  CHECK_FALSE(p.graph().has_update(UpdateId{1}));
  p.check_invariants();
}

TEST_CASE("the eight-event scenario ships q7 against u1 and u6") {
  const LoadedTrace in = load_trace(decouple::testing::fixture("eight_event/trace.jsonl"));
  VCoverPolicy p(in.catalog, 32 * kGB, 1);
  for (std::uint64_t o : {1, 2, 3}) p.seed(ObjectId{o});
  std::vector<Decision> at_q7;
  for (const Event& ev : in.trace) {
    if (!ev.is_query()) {
      CHECK(p.on_update(ev.update()).empty());
      continue;
    }
    auto ds = p.on_query(ev.query());
    if (ev.query().id == QueryId{3}) {
      CHECK(ds[0] == Decision{ShipQuery{QueryId{3}, 15 * kGB}});
      CHECK(p.cache().resident(ObjectId{4}));
    }
    if (ev.query().id == QueryId{7}) {
      at_q7 = ds;
      // 9 GB query against 11 GB of updates: the query is the cheaper side.
      CHECK(p.graph().has_query(QueryId{7}));
      CHECK(p.graph().has_update(UpdateId{1}));
      CHECK(p.graph().has_update(UpdateId{6}));
      CHECK(p.graph().update_count() == 2);
    }
    p.check_invariants();
  }
  REQUIRE(at_q7.size() == 1);
  CHECK(at_q7[0] == Decision{ShipQuery{QueryId{7}, 9 * kGB}});
}

TEST_CASE("mixed traces replay under the audit with the graph in sync") {
  GeneratorParams params;
  params.n_objects = 8;
  params.n_queries = 25;
  params.n_updates = 25;
  params.query_hotspots = {2, 3};
  params.update_hotspots = {6};
  params.scan_width = 2;
  params.size_max = 2 * kGB;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Workload w = generate(params, seed);
    VCoverPolicy p(w.catalog, w.catalog.total_size() / 3, seed);
    for (const Event& ev : w.trace) {
      if (ev.is_query()) {
        p.on_query(ev.query());
      } else {
        p.on_update(ev.update());
      }
      p.check_invariants();
    }
    VCoverPolicy fresh(w.catalog, w.catalog.total_size() / 3, seed);
    const RunReport r = simulate(fresh, w.trace, w.catalog, RunOptions{});
    CHECK(r.audit_passed);
  }
}

}  // TEST_SUITE
