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

#include "decouple/benefit.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace decouple {

std::vector<Bytes> proportional_shares(Bytes total, std::span<const Bytes> weights) {
  std::vector<Bytes> shares(weights.size(), 0);
  if (weights.empty()) return shares;
  const __int128 sum = std::accumulate(weights.begin(), weights.end(), __int128{0});
  if (sum <= 0) {
    shares[0] = total;
    return shares;
  }
  std::vector<__int128> remainder(weights.size());
  Bytes assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const __int128 scaled = static_cast<__int128>(total) * weights[i];
    shares[i] = static_cast<Bytes>(scaled / sum);
    remainder[i] = scaled % sum;
    assigned += shares[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++shares[order[k % order.size()]];
  return shares;
}

Bytes WindowStats::benefit(ObjectId o, bool resident, const ObjectCatalog& catalog) const {
  Bytes b = 0;
  if (auto it = per_object.find(o); it != per_object.end()) {
    b = it->second.saved - it->second.update_cost;
  }
  if (!resident) b -= catalog.load_cost(o);
  return b;
}

void accrue_query(WindowStats& stats, const Query& q, bool answered_at_cache,
                  const CacheState& cache, const ObjectCatalog& catalog) {
  std::vector<Bytes> sizes;
  sizes.reserve(q.objects.size());
  for (ObjectId o : q.objects) sizes.push_back(catalog.size_of(o));
  const std::vector<Bytes> shares = proportional_shares(q.ship_cost, sizes);
  for (std::size_t i = 0; i < q.objects.size(); ++i) {
    const ObjectId o = q.objects[i];
    if (!cache.resident(o) || answered_at_cache) stats.per_object[o].saved += shares[i];
  }
}

void accrue_update(WindowStats& stats, const Update& u, const CacheState& cache) {
  if (!cache.resident(u.object)) stats.per_object[u.object].update_cost += u.ship_cost;
}

void accrue_shipped(WindowStats& stats, std::span<const Update> shipped) {
  for (const Update& u : shipped) stats.per_object[u.object].update_cost += u.ship_cost;
}

double smooth(double mu, double b, double alpha) { return (1.0 - alpha) * mu + alpha * b; }

std::vector<ObjectId> greedy_selection(const std::map<ObjectId, double>& score,
                                       Bytes capacity, const ObjectCatalog& catalog) {
  std::vector<std::pair<double, ObjectId>> ranked;
  for (const auto& [o, s] : score) {
    if (s > 0.0) ranked.emplace_back(s, o);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<ObjectId> selected;
  Bytes used = 0;
  for (const auto& [s, o] : ranked) {
    const Bytes size = catalog.size_of(o);
    if (used + size > capacity) continue;
    used += size;
    selected.push_back(o);
  }
  return selected;
}

std::vector<Decision> roll_window(Forecast& forecast, const WindowStats& stats,
                                  const CacheState& cache, const ObjectCatalog& catalog) {
  for (const auto& [o, info] : catalog) {
    double& mu = forecast.mu[o];
    mu = smooth(mu, static_cast<double>(stats.benefit(o, cache.resident(o), catalog)),
                forecast.alpha);
  }
  const std::vector<ObjectId> selected =
      greedy_selection(forecast.mu, cache.capacity(), catalog);
  const std::set<ObjectId> keep(selected.begin(), selected.end());

  std::vector<Decision> decisions;
  for (ObjectId o : cache.resident_set()) {
    if (!keep.contains(o)) decisions.emplace_back(Evict{o});
  }
  for (ObjectId o : selected) {
    if (!cache.resident(o)) decisions.emplace_back(Load{o});
  }
  return decisions;
}

BenefitPolicy::BenefitPolicy(const ObjectCatalog& catalog, Bytes capacity, double alpha,
                             std::uint64_t delta)
    : catalog_(&catalog), cache_(capacity) {
  if (alpha < 0.0 || alpha > 1.0) throw Error("benefit: alpha must lie in [0, 1]");
  if (delta < 1) throw Error("benefit: window length must be at least one event");
  forecast_.alpha = alpha;
  forecast_.delta = delta;
  for (ObjectId o : catalog.ids()) forecast_.mu[o] = 0.0;
}

std::vector<Decision> BenefitPolicy::on_query(const Query& q) {
  std::vector<Decision> out;
  if (cache_.all_resident(q.objects)) {
    std::vector<Update> needed = interacting_updates(q, cache_, q.time);
    if (!needed.empty()) {
      accrue_shipped(stats_, needed);
      commit(ShipUpdates{std::move(needed)}, out);
    }
    accrue_query(stats_, q, true, cache_, *catalog_);
    commit(AnswerFromCache{q.id}, out);
  } else {
    accrue_query(stats_, q, false, cache_, *catalog_);
    commit(ShipQuery{q.id, q.ship_cost}, out);
  }
  end_of_event(out);
  return out;
}

std::vector<Decision> BenefitPolicy::on_update(const Update& u) {
  std::vector<Decision> out;
  accrue_update(stats_, u, cache_);
  cache_.receive(u);
  end_of_event(out);
  return out;
}

void BenefitPolicy::end_of_event(std::vector<Decision>& out) {
  if (++events_in_window_ < forecast_.delta) return;
  for (const Decision& d : roll_window(forecast_, stats_, cache_, *catalog_)) commit(d, out);
  stats_ = {};
  events_in_window_ = 0;
}

void BenefitPolicy::commit(const Decision& d, std::vector<Decision>& out) {
  cache_.apply(d, *catalog_);
  out.push_back(d);
}

}  // namespace decouple
