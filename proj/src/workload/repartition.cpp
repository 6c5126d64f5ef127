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
#include <map>
#include <random>
#include <set>

#include "decouple/workload.hpp"

namespace decouple {

namespace {

// Splits `total` into `parts` near-equal positive pieces.
std::vector<Bytes> equal_split(Bytes total, std::uint64_t parts) {
  std::vector<Bytes> out(parts, total / static_cast<Bytes>(parts));
  for (Bytes r = total % static_cast<Bytes>(parts), i = 0; i < r; ++i) ++out[i];
  return out;
}

Workload merge(const Workload& w, std::uint64_t k) {
  const std::vector<ObjectId> ids = w.catalog.ids();
  const std::uint64_t n = ids.size();
  std::map<ObjectId, ObjectId> to;
  Workload out;
  for (std::uint64_t g = 0; g < k; ++g) {
    Bytes size = 0;
    Bytes load = 0;
    for (std::uint64_t i = g * n / k; i < (g + 1) * n / k; ++i) {
      size += w.catalog.size_of(ids[i]);
      load += w.catalog.load_cost(ids[i]);
      to[ids[i]] = ObjectId{g + 1};
    }
    out.catalog.add(ObjectId{g + 1}, size, load);
  }
  out.trace.reserve(w.trace.size());
  for (Event ev : w.trace) {
    if (ev.is_query()) {
      Query& q = std::get<Query>(ev.body);
      std::set<ObjectId> mapped;
      for (ObjectId o : q.objects) mapped.insert(to.at(o));
      q.objects.assign(mapped.begin(), mapped.end());
    } else {
      Update& u = std::get<Update>(ev.body);
      u.object = to.at(u.object);
    }
    out.trace.push_back(std::move(ev));
  }
  return out;
}

Workload split(const Workload& w, std::uint64_t k, std::uint64_t seed) {
  const std::vector<ObjectId> ids = w.catalog.ids();
  const std::uint64_t n = ids.size();
  struct Pieces {
    std::uint64_t first;  // id of the first piece
    std::uint64_t count;
  };
  std::map<ObjectId, Pieces> to;
  Workload out;
  std::uint64_t next = 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t count = (i + 1) * k / n - i * k / n;
    const ObjectInfo& info = w.catalog.at(ids[i]);
    if (info.size < static_cast<Bytes>(count)) {
      throw Error("object " + std::to_string(ids[i].value) + " is too small to split into " +
                  std::to_string(count) + " pieces");
    }
    const auto sizes = equal_split(info.size, count);
    const auto loads = equal_split(info.load_cost, count);
    to[ids[i]] = Pieces{next, count};
    for (std::uint64_t p = 0; p < count; ++p) out.catalog.add(ObjectId{next++}, sizes[p], loads[p]);
  }

  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
  };
  out.trace.reserve(w.trace.size());
  for (Event ev : w.trace) {
    if (ev.is_query()) {
      Query& q = std::get<Query>(ev.body);
      std::vector<ObjectId> mapped;
      for (ObjectId o : q.objects) {
        const Pieces& p = to.at(o);
        const std::uint64_t len = pick(1, p.count);
        const std::uint64_t start = pick(0, p.count - len);
        for (std::uint64_t j = 0; j < len; ++j) mapped.push_back(ObjectId{p.first + start + j});
      }
      q.objects = std::move(mapped);  // already sorted: pieces keep the id order
    } else {
      Update& u = std::get<Update>(ev.body);
      const Pieces& p = to.at(u.object);
      u.object = ObjectId{p.first + pick(0, p.count - 1)};
    }
    out.trace.push_back(std::move(ev));
  }
  return out;
}

}  // namespace

Workload repartition(const Workload& workload, std::uint64_t granularity, std::uint64_t seed) {
  const std::uint64_t n = workload.catalog.count();
  if (granularity == 0) throw Error("granularity must be positive");
  if (n == 0) throw Error("cannot repartition an empty catalog");
  if (granularity == n) return workload;
  return granularity < n ? merge(workload, granularity) : split(workload, granularity, seed);
}

Trace scale_updates(const Trace& trace, std::uint64_t factor) {
  if (factor == 0) throw Error("update scale factor must be positive");
  Trace out;
  out.reserve(trace.size());
  std::uint64_t seq = 0;
  for (const Event& ev : trace) {
    if (ev.is_query()) {
      Event copy = ev;
      copy.seq = seq++;
      out.push_back(std::move(copy));
      continue;
    }
    for (std::uint64_t c = 0; c < factor; ++c) {
      Update u = ev.update();
      u.id = UpdateId{u.id.value * factor + c};
      out.push_back(Event{seq++, u});
    }
  }
  return out;
}

}  // namespace decouple
