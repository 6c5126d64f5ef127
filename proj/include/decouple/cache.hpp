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

#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "decouple/types.hpp"

namespace decouple {

class CacheError : public Error {
 public:
  using Error::Error;
};

enum class Freshness { fresh, stale };

/**
 * Contents of the middleware cache.
 *
 * An object is stale exactly when it has outstanding updates, i.e. updates
 * that reached the server after the object was loaded and have not been
 * shipped yet. Updates for objects that are not resident are not queued.
 */
class CacheState {
 public:
  CacheState() = default;
  explicit CacheState(Bytes capacity);

  Bytes capacity() const { return capacity_; }
  Bytes used() const { return used_; }
  Bytes free_space() const { return capacity_ - used_; }

  bool resident(ObjectId o) const { return resident_.contains(o); }
  bool all_resident(std::span<const ObjectId> objects) const;
  const std::set<ObjectId>& resident_set() const { return resident_; }

  /// Throws CacheError if `o` is not resident.
  Freshness freshness(ObjectId o) const;
  std::span<const Update> outstanding(ObjectId o) const;

  /// Server-side arrival of `u`. Returns true when the update was queued
  /// against a resident object.
  bool receive(const Update& u);

  /**
   * Applies one decision.
   *
   * Load marks the object fresh with an empty outstanding list, ShipUpdates
   * removes the shipped updates, Evict drops the object and its queue.
   * ShipQuery and AnswerFromCache leave the state untouched.
   */
  void apply(const Decision& d, const ObjectCatalog& catalog);

  /// Places `o` in the cache without going through a Load decision (used
  /// to seed initial states, e.g. a full replica).
  void seed(ObjectId o, const ObjectCatalog& catalog);

  /// Throws CacheError on any broken invariant.
  void check_invariants(const ObjectCatalog& catalog) const;

  friend bool operator==(const CacheState&, const CacheState&) = default;

 private:
  Bytes capacity_ = 0;
  Bytes used_ = 0;
  std::set<ObjectId> resident_;
  std::map<ObjectId, std::vector<Update>> outstanding_;
};

/**
 * Outstanding updates on B(q) that an answer to `q` at time `now` must
 * incorporate: those received no later than now - t(q).
 * Throws CacheError if some object of B(q) is not resident.
 */
std::vector<Update> interacting_updates(const Query& q, const CacheState& cache,
                                        Micros now);

struct LedgerSample {
  std::uint64_t seq = 0;
  Bytes total = 0;
  friend bool operator==(const LedgerSample&, const LedgerSample&) = default;
};

/// Cumulative network traffic, split by mechanism.
class TrafficLedger {
 public:
  /// Charges `d` and appends a sample when it moved bytes. Returns the
  /// number of bytes charged.
  Bytes record(const Decision& d, const ObjectCatalog& catalog, std::uint64_t seq);

  Bytes query_ship() const { return query_ship_; }
  Bytes update_ship() const { return update_ship_; }
  Bytes load() const { return load_; }
  Bytes total() const { return query_ship_ + update_ship_ + load_; }
  const std::vector<LedgerSample>& samples() const { return samples_; }

  friend bool operator==(const TrafficLedger&, const TrafficLedger&) = default;

 private:
  Bytes query_ship_ = 0;
  Bytes update_ship_ = 0;
  Bytes load_ = 0;
  std::vector<LedgerSample> samples_;
};

/// Bytes a decision moves over the network.
Bytes traffic_of(const Decision& d, const ObjectCatalog& catalog);

}  // namespace decouple
