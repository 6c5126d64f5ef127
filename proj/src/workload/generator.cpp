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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "decouple/workload.hpp"

namespace decouple {

namespace {

using Rng = std::mt19937_64;

template <class... Parts>
[[noreturn]] void bad_param(const Parts&... parts) {
  std::ostringstream msg;
  msg << "invalid generator parameters: ";
  (msg << ... << parts);
  throw Error(msg.str());
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

// Maximal runs of consecutive ids.
std::vector<std::vector<std::uint64_t>> clusters_of(std::vector<std::uint64_t> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::vector<std::uint64_t>> out;
  for (std::uint64_t id : ids) {
    if (out.empty() || out.back().back() + 1 != id) out.emplace_back();
    out.back().push_back(id);
  }
  return out;
}

std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

}  // namespace

void validate(const GeneratorParams& p) {
  if (p.n_objects < 1) bad_param("n_objects must be at least 1");
  if (p.size_min <= 0 || p.size_max < p.size_min) bad_param("need 0 < size_min <= size_max");
  if (!is_probability(p.query_hotspot_weight)) bad_param("query_hotspot_weight not in [0,1]");
  if (!is_probability(p.update_hotspot_weight)) bad_param("update_hotspot_weight not in [0,1]");
  for (std::uint64_t h : p.query_hotspots) {
    if (h < 1 || h > p.n_objects) bad_param("query hotspot ", h, " outside the catalog");
  }
  for (std::uint64_t h : p.update_hotspots) {
    if (h < 1 || h > p.n_objects) bad_param("update hotspot ", h, " outside the catalog");
  }
  if (p.query_hotspot_weight > 0 && p.query_hotspots.empty()) bad_param("no query hotspots");
  if (p.update_hotspot_weight > 0 && p.update_hotspots.empty()) bad_param("no update hotspots");
  if (p.query_phases < 1) bad_param("query_phases must be at least 1");
  if (p.scan_length < 1) bad_param("scan_length must be at least 1");
  if (p.scan_width < 1 || p.scan_width > p.n_objects) bad_param("scan_width not in [1, n_objects]");
  if (p.max_objects_per_query < 1 || p.max_objects_per_query > p.n_objects) {
    bad_param("max_objects_per_query not in [1, n_objects]");
  }
  if (!is_probability(p.tolerance_p_zero) || !is_probability(p.tolerance_p_small) ||
      p.tolerance_p_zero + p.tolerance_p_small > 1.0) {
    bad_param("tolerance mix probabilities must be in [0,1] and sum to at most 1");
  }
  if (p.tolerance_small < 0 || p.tolerance_large < 0) bad_param("negative tolerance");
  if (!(p.selectivity_min > 0.0) || p.selectivity_max < p.selectivity_min) {
    bad_param("need 0 < selectivity_min <= selectivity_max");
  }
  if (!(p.update_fraction > 0.0)) bad_param("update_fraction must be positive");
  if (p.mean_interarrival < 0) bad_param("mean_interarrival must not be negative");
}

nlohmann::ordered_json to_json(const GeneratorParams& p) {
  nlohmann::ordered_json j;
  j["n_objects"] = p.n_objects;
  j["size_min"] = p.size_min;
  j["size_max"] = p.size_max;
  j["n_queries"] = p.n_queries;
  j["n_updates"] = p.n_updates;
  j["query_hotspots"] = p.query_hotspots;
  j["query_hotspot_weight"] = p.query_hotspot_weight;
  j["query_phases"] = p.query_phases;
  j["update_hotspots"] = p.update_hotspots;
  j["update_hotspot_weight"] = p.update_hotspot_weight;
  j["scan_length"] = p.scan_length;
  j["scan_width"] = p.scan_width;
  j["max_objects_per_query"] = p.max_objects_per_query;
  j["tolerance_p_zero"] = p.tolerance_p_zero;
  j["tolerance_p_small"] = p.tolerance_p_small;
  j["tolerance_small"] = p.tolerance_small;
  j["tolerance_large"] = p.tolerance_large;
  j["selectivity_min"] = p.selectivity_min;
  j["selectivity_max"] = p.selectivity_max;
  j["update_fraction"] = p.update_fraction;
  j["mean_interarrival"] = p.mean_interarrival;
  return j;
}

GeneratorParams generator_params_from_json(const nlohmann::json& j) {
  GeneratorParams p;
  auto read = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  read("n_objects", p.n_objects);
  read("size_min", p.size_min);
  read("size_max", p.size_max);
  read("n_queries", p.n_queries);
  read("n_updates", p.n_updates);
  read("query_hotspots", p.query_hotspots);
  read("query_hotspot_weight", p.query_hotspot_weight);
  read("query_phases", p.query_phases);
  read("update_hotspots", p.update_hotspots);
  read("update_hotspot_weight", p.update_hotspot_weight);
  read("scan_length", p.scan_length);
  read("scan_width", p.scan_width);
  read("max_objects_per_query", p.max_objects_per_query);
  read("tolerance_p_zero", p.tolerance_p_zero);
  read("tolerance_p_small", p.tolerance_p_small);
  read("tolerance_small", p.tolerance_small);
  read("tolerance_large", p.tolerance_large);
  read("selectivity_min", p.selectivity_min);
  read("selectivity_max", p.selectivity_max);
  read("update_fraction", p.update_fraction);
  read("mean_interarrival", p.mean_interarrival);
  return p;
}

Workload generate(const GeneratorParams& p, std::uint64_t seed) {
  validate(p);
  Rng rng(seed);
  Workload w;

  const std::uint64_t n = p.n_objects;
  std::vector<Bytes> sizes(n + 1, 0);
  for (std::uint64_t id = 1; id <= n; ++id) {
    sizes[id] = std::max<Bytes>(
        1, std::llround(log_uniform(rng, static_cast<double>(p.size_min),
                                    static_cast<double>(p.size_max))));
    w.catalog.add(ObjectId{id}, sizes[id]);
  }

  std::vector<bool> is_query(p.n_queries + p.n_updates, false);
  std::fill_n(is_query.begin(), p.n_queries, true);
  std::shuffle(is_query.begin(), is_query.end(), rng);

  const auto query_clusters = clusters_of(p.query_hotspots);
  const std::vector<std::uint64_t>& update_starts = p.update_hotspots;
  std::bernoulli_distribution query_hot(p.query_hotspot_weight);
  std::bernoulli_distribution update_hot(p.update_hotspot_weight);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> gap(
      p.mean_interarrival > 0 ? 1.0 / static_cast<double>(p.mean_interarrival) : 1.0);

  Micros now = 0;
  std::uint64_t queries = 0;
  std::uint64_t updates = 0;
  std::uint64_t scan_start = 1;
  w.trace.reserve(is_query.size());

  for (std::uint64_t seq = 0; seq < is_query.size(); ++seq) {
    if (p.mean_interarrival > 0) now += static_cast<Micros>(std::llround(gap(rng)));
    Event ev;
    ev.seq = seq;
    if (is_query[seq]) {
      const std::uint64_t phase = queries * p.query_phases / std::max<std::uint64_t>(p.n_queries, 1);
      const std::uint64_t width = uniform_int(rng, 1, p.max_objects_per_query);
      std::uint64_t first;
      if (!query_clusters.empty() && query_hot(rng)) {
        const auto& cluster = query_clusters[phase % query_clusters.size()];
        const std::uint64_t h = cluster[uniform_int(rng, 0, cluster.size() - 1)];
        const std::uint64_t offset = uniform_int(rng, 0, width - 1);
        first = h > offset ? h - offset : 1;
        first = std::clamp<std::uint64_t>(first, 1, n - width + 1);
      } else {
        first = uniform_int(rng, 1, n - width + 1);
      }
      Query q;
      q.id = QueryId{++queries};
      q.time = now;
      Bytes volume = 0;
      for (std::uint64_t id = first; id < first + width; ++id) {
        q.objects.push_back(ObjectId{id});
        volume += sizes[id];
      }
      const double selectivity = log_uniform(rng, p.selectivity_min, p.selectivity_max);
      q.ship_cost = std::max<Bytes>(1, std::llround(selectivity * static_cast<double>(volume)));
      const double t = unit(rng);
      q.tolerance = t < p.tolerance_p_zero                          ? 0
                    : t < p.tolerance_p_zero + p.tolerance_p_small ? p.tolerance_small
                                                                    : p.tolerance_large;
      ev.body = std::move(q);
    } else {
      const std::uint64_t step = updates % p.scan_length;
      if (step == 0) {
        scan_start = !update_starts.empty() && update_hot(rng)
                         ? update_starts[uniform_int(rng, 0, update_starts.size() - 1)]
                         : uniform_int(rng, 1, n - p.scan_width + 1);
        scan_start = std::min(scan_start, n - p.scan_width + 1);
      }
      Update u;
      u.id = UpdateId{++updates};
      u.time = now;
      u.object = ObjectId{scan_start + step % p.scan_width};
      u.ship_cost = std::max<Bytes>(
          1, std::llround(p.update_fraction * static_cast<double>(sizes[u.object.value])));
      ev.body = u;
    }
    w.trace.push_back(std::move(ev));
  }
  return w;
}

}  // namespace decouple
