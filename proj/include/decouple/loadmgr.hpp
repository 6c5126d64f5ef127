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
 * @file loadmgr.hpp
 * @brief Load decisions for queries that touch objects missing from the cache.
 *
 * A shipped query's cost is handed out, in random object order, to the
 * missing objects it accesses. An object whose load cost is covered becomes
 * a load candidate outright; the object that receives the last partial
 * share becomes one with probability share / load cost. In expectation an
 * object is therefore nominated once the queries touching it have shipped
 * about as many bytes as loading it would take, without keeping any
 * per-object counters.
 *
 * Candidates from one query are fed to a lazy Greedy-Dual-Size cache: the
 * whole batch is simulated first and only the net change in residency is
 * emitted, so an object is never loaded just to be evicted by a later
 * candidate of the same batch.
 */

#pragma once

#include <map>
#include <random>
#include <utility>
#include <vector>

#include "decouple/cache.hpp"
#include "decouple/types.hpp"

namespace decouple {

/// Greedy-Dual-Size bookkeeping: global inflation L and per-object credit H.
struct GdsState {
  double inflation = 0.0;
  std::map<ObjectId, double> credit;

  friend bool operator==(const GdsState&, const GdsState&) = default;
};

/// Candidates nominated by one query, in nomination order.
using CandidacyBatch = std::vector<ObjectId>;

using Rng = std::mt19937_64;

/// Randomized cost attribution over the non-resident objects of `q`.
CandidacyBatch offer(const Query& q, const CacheState& cache,
                     const ObjectCatalog& catalog, Rng& rng);

/// H(o) <- L + load_cost(o) / size(o).
GdsState gds_touch(GdsState state, ObjectId o, const ObjectCatalog& catalog);

/**
 * Runs Greedy-Dual-Size over `batch` on a scratch copy of the residency and
 * returns the net Evict decisions followed by the net Load decisions.
 * A candidate that cannot fit after evicting every resident whose credit does
 * not exceed its own is refused, leaving the simulation unchanged.
 */
std::pair<GdsState, std::vector<Decision>> gds_lazy_apply(GdsState state,
                                                          const CacheState& cache,
                                                          const CandidacyBatch& batch,
                                                          const ObjectCatalog& catalog);

class LoadManager {
 public:
  LoadManager(const ObjectCatalog& catalog, std::uint64_t seed);

  /**
   * Handles a shipped query: refreshes the credit of the resident objects it
   * touched, nominates candidates and returns the load/evict decisions.
   */
  std::vector<Decision> on_shipped_query(const Query& q, const CacheState& cache);

  /// Refreshes the credit of the resident objects `q` touches.
  void on_access(const Query& q, const CacheState& cache);

  /// Drops the credit of an object that left the cache.
  void forget(ObjectId o) { gds_.credit.erase(o); }

  const GdsState& gds() const { return gds_; }

 private:
  const ObjectCatalog* catalog_;
  Rng rng_;
  GdsState gds_;
};

}  // namespace decouple
