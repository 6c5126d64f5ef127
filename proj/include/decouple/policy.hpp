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

#include <string_view>
#include <vector>

#include "decouple/cache.hpp"
#include "decouple/types.hpp"

namespace decouple {

/**
 * A caching policy sees the trace one event at a time and answers with the
 * decisions to take. Decisions are returned in the order they must be
 * applied; the simulator applies them to its own copy of the cache and
 * charges the traffic.
 */
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const = 0;

  /// Cache contents before the first event.
  virtual const CacheState& cache() const = 0;

  /// Decisions taken before the first event (e.g. initial loads).
  virtual std::vector<Decision> start() { return {}; }
  virtual std::vector<Decision> on_query(const Query& q) = 0;
  virtual std::vector<Decision> on_update(const Update& u) = 0;
  virtual std::vector<Decision> finalize() { return {}; }
};

}  // namespace decouple
