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
 * @file vcover.hpp
 * @brief The vertex-cover policy.
 *
 * Queries whose objects are all cached go to the update manager, which
 * weighs shipping the query against shipping the updates it depends on by
 * maintaining a minimum-weight vertex cover over the interaction graph of
 * past queries and outstanding updates. Any other query is shipped and
 * handed to the load manager.
 */

#pragma once

#include <map>

#include "decouple/cache.hpp"
#include "decouple/covergraph.hpp"
#include "decouple/loadmgr.hpp"
#include "decouple/policy.hpp"

namespace decouple {

class VCoverPolicy final : public Policy {
 public:
  VCoverPolicy(const ObjectCatalog& catalog, Bytes capacity, std::uint64_t seed);

  std::string_view name() const override { return "vcover"; }
  const CacheState& cache() const override { return cache_; }

  std::vector<Decision> on_query(const Query& q) override;
  std::vector<Decision> on_update(const Update& u) override;

  /// Places `o` in the cache, fresh, before the first event.
  void seed(ObjectId o) { cache_.seed(o, *catalog_); }

  /// Decides a query whose objects are all resident.
  std::vector<Decision> update_manager(const Query& q);

  const InteractionGraph& graph() const { return graph_; }
  const LoadManager& load_manager() const { return loadmgr_; }

  /// Throws if the graph references updates that are no longer outstanding.
  void check_invariants() const;

 private:
  void commit(const Decision& d, std::vector<Decision>& out);

  const ObjectCatalog* catalog_;
  CacheState cache_;
  InteractionGraph graph_;
  std::map<UpdateId, Update> graph_updates_;
  LoadManager loadmgr_;
};

}  // namespace decouple
