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

#include "decouple/cache.hpp"
#include "support.hpp"

using namespace decouple;
using decouple::testing::catalog_of;
using decouple::testing::TraceBuilder;

TEST_SUITE("core") {

TEST_CASE("catalog rejects bad entries") {
  ObjectCatalog c;
  c.add(ObjectId{1}, 10);
  CHECK(c.load_cost(ObjectId{1}) == 10);
  c.add(ObjectId{2}, 10, 4);
  CHECK(c.load_cost(ObjectId{2}) == 4);
  CHECK(c.total_size() == 20);
  CHECK_THROWS_AS(c.add(ObjectId{1}, 5), Error);
  CHECK_THROWS_AS(c.add(ObjectId{3}, 0), Error);
  CHECK_THROWS_AS(c.at(ObjectId{9}), Error);
}

TEST_CASE("load then evict restores the empty state") {
  const auto cat = catalog_of({4, 6});
  CacheState c(10);
  const CacheState empty = c;
  c.apply(Load{ObjectId{1}}, cat);
  CHECK(c.used() == 4);
  CHECK(c.freshness(ObjectId{1}) == Freshness::fresh);
  c.apply(Evict{ObjectId{1}}, cat);
  CHECK(c == empty);
}

TEST_CASE("load over capacity and evicting a missing object fail") {
  const auto cat = catalog_of({4, 7});
  CacheState c(10);
  c.apply(Load{ObjectId{1}}, cat);
  CHECK_THROWS_AS(c.apply(Load{ObjectId{2}}, cat), CacheError);
  CHECK_THROWS_AS(c.apply(Load{ObjectId{1}}, cat), CacheError);
  CHECK_THROWS_AS(c.apply(Evict{ObjectId{2}}, cat), CacheError);
  CHECK_THROWS_AS(c.apply(Load{ObjectId{3}}, cat), CacheError);
  CHECK(c.used() == 4);
}

TEST_CASE("updates make resident objects stale until shipped") {
  const auto cat = catalog_of({4});
  CacheState c(10);
  const Update u{UpdateId{1}, 5, ObjectId{1}, 2};
  CHECK_FALSE(c.receive(u));
  c.apply(Load{ObjectId{1}}, cat);
  CHECK(c.receive(u));
  CHECK(c.freshness(ObjectId{1}) == Freshness::stale);
  c.apply(ShipUpdates{{u}}, cat);
  CHECK(c.freshness(ObjectId{1}) == Freshness::fresh);
  CHECK_THROWS_AS(c.apply(ShipUpdates{{u}}, cat), CacheError);
  c.check_invariants(cat);
}

TEST_CASE("a reload drops the outstanding queue") {
  const auto cat = catalog_of({4});
  CacheState c(10);
  c.apply(Load{ObjectId{1}}, cat);
  c.receive(Update{UpdateId{1}, 5, ObjectId{1}, 2});
  c.apply(Evict{ObjectId{1}}, cat);
  c.apply(Load{ObjectId{1}}, cat);
  CHECK(c.outstanding(ObjectId{1}).empty());
}

TEST_CASE("interacting updates respect the tolerance boundary") {
  const auto cat = catalog_of({4, 4});
  CacheState c(10);
  c.apply(Load{ObjectId{1}}, cat);
  c.apply(Load{ObjectId{2}}, cat);
  c.receive(Update{UpdateId{1}, 10, ObjectId{1}, 1});
  c.receive(Update{UpdateId{2}, 20, ObjectId{1}, 1});
  c.receive(Update{UpdateId{3}, 30, ObjectId{2}, 1});
  Query q{QueryId{1}, 30, {ObjectId{1}, ObjectId{2}}, 5, 10};
  // u.time <= now - t(q) interacts; u2 sits exactly on the boundary.
  const auto hit = interacting_updates(q, c, 30);
  REQUIRE(hit.size() == 2);
  CHECK(hit[0].id == UpdateId{1});
  CHECK(hit[1].id == UpdateId{2});
  q.tolerance = 0;
  CHECK(interacting_updates(q, c, 30).size() == 3);
  Query missing{QueryId{2}, 30, {ObjectId{3}}, 5, 0};
  CHECK_THROWS_AS(interacting_updates(missing, c, 30), CacheError);
}

TEST_CASE("ledger charges each mechanism separately") {
  const auto cat = catalog_of({4, 6});
  TrafficLedger l;
  CHECK(l.record(ShipQuery{QueryId{1}, 3}, cat, 0) == 3);
  CHECK(l.record(Load{ObjectId{2}}, cat, 1) == 6);
  CHECK(l.record(ShipUpdates{{Update{UpdateId{1}, 0, ObjectId{2}, 2},
                              Update{UpdateId{2}, 0, ObjectId{2}, 5}}},
                 cat, 2) == 7);
  CHECK(l.record(AnswerFromCache{QueryId{2}}, cat, 3) == 0);
  CHECK(l.record(Evict{ObjectId{2}}, cat, 4) == 0);
  CHECK(l.query_ship() == 3);
  CHECK(l.load() == 6);
  CHECK(l.update_ship() == 7);
  CHECK(l.total() == 16);
  REQUIRE(l.samples().size() == 3);
  CHECK(l.samples().back().total == 16);
}

TEST_CASE("check_trace enforces order, ids and references") {
  const auto cat = catalog_of({4, 4});
  CHECK_NOTHROW(check_trace(TraceBuilder().update(1, 0, 1, 1).query(1, 0, {1, 2}, 3).build(), cat));
  CHECK_THROWS_AS(check_trace(TraceBuilder().update(1, 5, 1, 1).query(1, 4, {1}, 3).build(), cat),
                  Error);
  CHECK_THROWS_AS(check_trace(TraceBuilder().query(1, 0, {3}, 3).build(), cat), Error);
  CHECK_THROWS_AS(check_trace(TraceBuilder().query(1, 0, {2, 1}, 3).build(), cat), Error);
  CHECK_THROWS_AS(check_trace(TraceBuilder().query(1, 0, {1}, 3).query(1, 1, {1}, 3).build(), cat),
                  Error);
}

TEST_CASE("decision kinds and descriptions") {
  CHECK(decision_kind(ShipQuery{QueryId{1}, 3}) == "ship_query");
  CHECK(decision_kind(ShipUpdates{}) == "ship_updates");
  CHECK(decision_kind(AnswerFromCache{QueryId{1}}) == "answer_from_cache");
  CHECK(decision_kind(Load{ObjectId{1}}) == "load");
  CHECK(decision_kind(Evict{ObjectId{1}}) == "evict");
  CHECK(describe(Load{ObjectId{7}}).find('7') != std::string::npos);
}

}  // TEST_SUITE
