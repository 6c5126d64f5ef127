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

#include "decouple/types.hpp"

#include <sstream>
#include <unordered_set>

namespace decouple {

void ObjectCatalog::add(ObjectId id, Bytes size, std::optional<Bytes> load_cost) {
  const Bytes cost = load_cost.value_or(size);
  if (size <= 0 || cost <= 0) {
    std::ostringstream msg;
    msg << "object " << id << ": size and load cost must be positive";
    throw Error(msg.str());
  }
  if (!entries_.emplace(id, ObjectInfo{size, cost}).second) {
    std::ostringstream msg;
    msg << "duplicate object " << id;
    throw Error(msg.str());
  }
  total_size_ += size;
}

const ObjectInfo& ObjectCatalog::at(ObjectId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    std::ostringstream msg;
    msg << "unknown object " << id;
    throw Error(msg.str());
  }
  return it->second;
}

std::vector<ObjectId> ObjectCatalog::ids() const {
  std::vector<ObjectId> out;
  out.reserve(entries_.size());
  for (const auto& [id, info] : entries_) out.push_back(id);
  return out;
}

Micros Event::time() const {
  return std::visit([](const auto& e) { return e.time; }, body);
}

void check_trace(const Trace& trace, const ObjectCatalog& catalog) {
  std::unordered_set<QueryId> qids;
  std::unordered_set<UpdateId> uids;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Event& ev = trace[i];
    auto fail = [&](const std::string& what) {
      std::ostringstream msg;
      msg << "event " << i << " (seq " << ev.seq << "): " << what;
      throw Error(msg.str());
    };
    if (i > 0) {
      const Event& prev = trace[i - 1];
      if (ev.time() < prev.time()) fail("timestamp goes backwards");
      if (ev.seq <= prev.seq) fail("sequence number not increasing");
    }
    if (ev.is_query()) {
      const Query& q = ev.query();
      if (q.objects.empty()) fail("query accesses no objects");
      if (q.ship_cost < 0 || q.tolerance < 0) fail("negative cost or tolerance");
      for (std::size_t k = 0; k < q.objects.size(); ++k) {
        if (!catalog.contains(q.objects[k])) fail("unknown object");
        if (k > 0 && !(q.objects[k - 1] < q.objects[k])) fail("objects not sorted/unique");
      }
      if (!qids.insert(q.id).second) fail("duplicate query id");
    } else {
      const Update& u = ev.update();
      if (!catalog.contains(u.object)) fail("unknown object");
      if (u.ship_cost < 0) fail("negative cost");
      if (!uids.insert(u.id).second) fail("duplicate update id");
    }
  }
}

std::string_view decision_kind(const Decision& d) {
  struct Visitor {
    std::string_view operator()(const ShipQuery&) const { return "ship_query"; }
    std::string_view operator()(const ShipUpdates&) const { return "ship_updates"; }
    std::string_view operator()(const AnswerFromCache&) const { return "answer_from_cache"; }
    std::string_view operator()(const Load&) const { return "load"; }
    std::string_view operator()(const Evict&) const { return "evict"; }
  };
  return std::visit(Visitor{}, d);
}

std::string describe(const Decision& d) {
  std::ostringstream os;
  os << decision_kind(d);
  std::visit(
      [&os](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ShipQuery>) {
          os << ' ' << x.query << ' ' << x.cost;
        } else if constexpr (std::is_same_v<T, ShipUpdates>) {
          for (const Update& u : x.updates) os << ' ' << u.id;
        } else if constexpr (std::is_same_v<T, AnswerFromCache>) {
          os << ' ' << x.query;
        } else {
          os << ' ' << x.object;
        }
      },
      d);
  return os.str();
}

}  // namespace decouple
