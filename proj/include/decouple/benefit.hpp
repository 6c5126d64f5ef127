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
 * @file benefit.hpp
 * @brief Windowed benefit heuristic with an exponentially smoothed forecast.
 *
 * Per window every object accrues the query traffic it saved (its
 * size-proportional share of each query answered at the cache) minus the
 * update traffic it caused. Objects outside the cache accrue the same
 * quantities as if they had been cached, less one load. At each window
 * boundary the forecast is smoothed and the cache recomposed greedily.
 */

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "decouple/cache.hpp"
#include "decouple/policy.hpp"

namespace decouple {

/// Splits `total` over `weights` proportionally. The parts sum to `total`
/// exactly; leftover units go to the largest remainders (lowest index first).
std::vector<Bytes> proportional_shares(Bytes total, std::span<const Bytes> weights);

struct ObjectBenefit {
  Bytes saved = 0;
  Bytes update_cost = 0;
  friend bool operator==(const ObjectBenefit&, const ObjectBenefit&) = default;
};

struct WindowStats {
  std::map<ObjectId, ObjectBenefit> per_object;

  /// b for one object over the window; non-resident objects pay one load.
  Bytes benefit(ObjectId o, bool resident, const ObjectCatalog& catalog) const;
};

/// Credits the query's shares. Resident objects only profit when the query
/// was answered at the cache; non-resident objects always do (hypothetically).
void accrue_query(WindowStats& stats, const Query& q, bool answered_at_cache,
                  const CacheState& cache, const ObjectCatalog& catalog);

/// Charges an update arriving for a non-resident object. Updates for resident
/// objects are charged when shipped (see accrue_shipped).
void accrue_update(WindowStats& stats, const Update& u, const CacheState& cache);

void accrue_shipped(WindowStats& stats, std::span<const Update> shipped);

struct Forecast {
  double alpha = 0.5;
  std::uint64_t delta = 1000;
  std::map<ObjectId, double> mu;
};

/// mu' = (1 - alpha) mu + alpha b
double smooth(double mu, double b, double alpha);

/**
 * Closes a window: smooths the forecast of every catalog object, ranks the
 * objects with positive forecast (descending, ties by id) and fills the
 * cache greedily, skipping objects that do not fit. Returns the evictions
 * followed by the loads needed to reach the selection.
 */
std::vector<Decision> roll_window(Forecast& forecast, const WindowStats& stats,
                                  const CacheState& cache, const ObjectCatalog& catalog);

/// Greedy fill used by roll_window: positive scores only, descending.
std::vector<ObjectId> greedy_selection(const std::map<ObjectId, double>& score,
                                       Bytes capacity, const ObjectCatalog& catalog);

class BenefitPolicy final : public Policy {
 public:
  BenefitPolicy(const ObjectCatalog& catalog, Bytes capacity, double alpha,
                std::uint64_t delta);

  std::string_view name() const override { return "benefit"; }
  const CacheState& cache() const override { return cache_; }

  std::vector<Decision> on_query(const Query& q) override;
  std::vector<Decision> on_update(const Update& u) override;

  /// Places `o` in the cache, fresh, before the first event.
  void seed(ObjectId o) { cache_.seed(o, *catalog_); }

  const Forecast& forecast() const { return forecast_; }
  const WindowStats& window() const { return stats_; }

 private:
  void end_of_event(std::vector<Decision>& out);
  void commit(const Decision& d, std::vector<Decision>& out);

  const ObjectCatalog* catalog_;
  CacheState cache_;
  Forecast forecast_;
  WindowStats stats_;
  std::uint64_t events_in_window_ = 0;
};

}  // namespace decouple
