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
#include <map>
#include <numeric>
#include <random>

#include "decouple/benefit.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace decouple;
using decouple::testing::catalog_of;
using decouple::testing::TraceBuilder;

namespace {

// Window benefit of every object when nothing is cached, straight from the
// definition: query cost split by size, minus updates, minus one load.
std::map<ObjectId, double> cold_window_benefit(const Trace& trace, const ObjectCatalog& cat) {
  std::map<ObjectId, double> b;
  for (ObjectId o : cat.ids()) b[o] = -static_cast<double>(cat.load_cost(o));
  for (const Event& ev : trace) {
    if (ev.is_query()) {
      const Query& q = ev.query();
      double total = 0;
      for (ObjectId o : q.objects) total += static_cast<double>(cat.size_of(o));
      for (ObjectId o : q.objects) {
        b[o] += static_cast<double>(q.ship_cost) * static_cast<double>(cat.size_of(o)) / total;
      }
    } else {
      b[ev.update().object] -= static_cast<double>(ev.update().ship_cost);
    }
  }
  return b;
}

Trace window_trace() {
  return TraceBuilder()
      .query(1, 1, {1, 2}, 10)
      .update(1, 2, 1, 1)
      .query(2, 3, {2}, 4)
      .update(2, 4, 2, 2)
      .query(3, 5, {1}, 2)
      .build();
}

std::vector<Decision> feed(BenefitPolicy& p, const Event& ev) {
  return ev.is_query() ? p.on_query(ev.query()) : p.on_update(ev.update());
}

}  // namespace

TEST_SUITE("benefit") {

TEST_CASE("query cost is split in proportion to object size") {
  const std::vector<Bytes> w{3, 7};
  CHECK(proportional_shares(10, w) == std::vector<Bytes>{3, 7});
  const std::vector<Bytes> even{1, 1, 1};
  const auto s = proportional_shares(10, even);
  CHECK(std::accumulate(s.begin(), s.end(), Bytes{0}) == 10);
  CHECK(*std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()) <= 1);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Bytes> ws(1 + rng() % 5);
    for (auto& x : ws) x = 1 + static_cast<Bytes>(rng() % 1000);
    const Bytes total = static_cast<Bytes>(rng() % 100000);
    const auto shares = proportional_shares(total, ws);
    CHECK(std::accumulate(shares.begin(), shares.end(), Bytes{0}) == total);
    const double sum = std::accumulate(ws.begin(), ws.end(), 0.0);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      CHECK(std::abs(static_cast<double>(shares[i]) - total * ws[i] / sum) < 1.0);
    }
  }
}

TEST_CASE("an idle object outside the cache is charged its updates and one load") {
  const auto cat = catalog_of({10});
  WindowStats stats;
  CHECK(stats.benefit(ObjectId{1}, false, cat) == -10);
  CHECK(stats.benefit(ObjectId{1}, true, cat) == 0);
  const CacheState empty(100);
  accrue_update(stats, Update{UpdateId{1}, 0, ObjectId{1}, 3}, empty);
  accrue_update(stats, Update{UpdateId{2}, 0, ObjectId{1}, 4}, empty);
  CHECK(stats.benefit(ObjectId{1}, false, cat) == -17);
}

TEST_CASE("updates to resident objects count only once shipped") {
  const auto cat = catalog_of({10});
  CacheState cache(10);
  cache.seed(ObjectId{1}, cat);
  WindowStats stats;
  const Update u{UpdateId{1}, 0, ObjectId{1}, 3};
  accrue_update(stats, u, cache);
  CHECK(stats.benefit(ObjectId{1}, true, cat) == 0);
  accrue_shipped(stats, std::vector<Update>{u});
  CHECK(stats.benefit(ObjectId{1}, true, cat) == -3);
}

TEST_CASE("a five-event window matches the definition") {
  const auto cat = catalog_of({3, 7});
  const Trace trace = window_trace();
  BenefitPolicy p(cat, 7, 0.5, 5);
  std::vector<Decision> last;
  for (const Event& ev : trace) last = feed(p, ev);

  const auto b = cold_window_benefit(trace, cat);
  CHECK(b.at(ObjectId{1}) == doctest::Approx(1.0));
  CHECK(b.at(ObjectId{2}) == doctest::Approx(2.0));
  for (const auto& [o, value] : b) {
    CHECK(p.forecast().mu.at(o) == doctest::Approx(0.5 * value));
  }
  // Only o2 fits once it is chosen.
  REQUIRE(last.size() == 2);
  CHECK(last[1] == Decision{Load{ObjectId{2}}});
  CHECK(p.cache().resident(ObjectId{2}));
  CHECK(p.window().per_object.empty());
}

TEST_CASE("alpha bounds the memory of the forecast") {
  const auto cat = catalog_of({3, 7});
  const Trace trace = window_trace();
  BenefitPolicy none(cat, 7, 0.0, 5);
  BenefitPolicy all(cat, 7, 1.0, 5);
  for (const Event& ev : trace) {
    CHECK(feed(none, ev).size() == (ev.is_query() ? 1u : 0u));
    feed(all, ev);
  }
  CHECK(none.forecast().mu.at(ObjectId{2}) == 0.0);
  CHECK(none.cache().resident_set().empty());
  const auto b = cold_window_benefit(trace, cat);
  CHECK(all.forecast().mu.at(ObjectId{1}) == doctest::Approx(b.at(ObjectId{1})));
  CHECK(all.forecast().mu.at(ObjectId{2}) == doctest::Approx(b.at(ObjectId{2})));
}

TEST_CASE("repeated smoothing matches the closed form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> value(-100.0, 100.0);
  for (double alpha : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    const double mu0 = value(rng);
    std::vector<double> b(12);
    for (auto& x : b) x = value(rng);
    double mu = mu0;
    for (double x : b) mu = smooth(mu, x, alpha);
    CHECK(mu == doctest::Approx(oracle::smoothed(mu0, b, alpha)));
  }
}

TEST_CASE("greedy selection takes the best positive forecasts that fit") {
  const auto cat = catalog_of({1, 1, 1});
  const std::map<ObjectId, double> mu{{ObjectId{1}, 5}, {ObjectId{2}, 3}, {ObjectId{3}, -1}};
  const auto chosen = greedy_selection(mu, 2, cat);
  CHECK(chosen == std::vector<ObjectId>{ObjectId{1}, ObjectId{2}});

  double best = 0;
  for (unsigned mask = 0; mask < 8; ++mask) {
    double total = 0;
    int count = 0;
    for (unsigned i = 0; i < 3; ++i) {
      if (mask >> i & 1u) {
        total += mu.at(ObjectId{i + 1});
        ++count;
      }
    }
    if (count <= 2) best = std::max(best, total);
  }
  double got = 0;
  for (ObjectId o : chosen) got += mu.at(o);
  CHECK(got == best);
  CHECK(greedy_selection(mu, 0, cat).empty());
}

TEST_CASE("the cache answers fresh objects and refreshes stale ones") {
  const auto cat = catalog_of({3, 7});
  BenefitPolicy p(cat, 7, 0.5, 1000);
  p.seed(ObjectId{2});
  const auto fresh = p.on_query(TraceBuilder().query(1, 1, {2}, 5).build()[0].query());
  CHECK(fresh == std::vector<Decision>{AnswerFromCache{QueryId{1}}});

  const Update u{UpdateId{1}, 2, ObjectId{2}, 1};
  CHECK(p.on_update(u).empty());
  const auto stale = p.on_query(TraceBuilder().query(2, 3, {2}, 5).build()[0].query());
  CHECK(stale == std::vector<Decision>{ShipUpdates{{u}}, AnswerFromCache{QueryId{2}}});

  const auto missing = p.on_query(TraceBuilder().query(3, 4, {1, 2}, 5).build()[0].query());
  CHECK(missing == std::vector<Decision>{ShipQuery{QueryId{3}, 5}});
}

TEST_CASE("invalid parameters are rejected") {
  const auto cat = catalog_of({1});
  CHECK_THROWS_AS(BenefitPolicy(cat, 1, 1.5, 10), Error);
  CHECK_THROWS_AS(BenefitPolicy(cat, 1, 0.5, 0), Error);
}

}  // TEST_SUITE
