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
 * @file types.hpp
 * @brief Domain vocabulary shared by every policy: ids, objects, queries,
 *        updates, trace events and the decisions a policy can emit.
 */

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace decouple {

/// Network traffic and object sizes, in bytes.
using Bytes = std::int64_t;
/// Trace timestamps, in microseconds.
using Micros = std::int64_t;

inline constexpr Bytes kGB = 1'000'000'000;
inline constexpr Bytes kMB = 1'000'000;
inline constexpr Micros kSecond = 1'000'000;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Tag>
struct StrongId {
  std::uint64_t value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
  friend std::ostream& operator<<(std::ostream& os, StrongId id) {
    return os << id.value;
  }
};

struct ObjectTag {};
struct QueryTag {};
struct UpdateTag {};

using ObjectId = StrongId<ObjectTag>;
using QueryId = StrongId<QueryTag>;
using UpdateId = StrongId<UpdateTag>;

struct ObjectInfo {
  Bytes size = 0;
  Bytes load_cost = 0;
  friend bool operator==(const ObjectInfo&, const ObjectInfo&) = default;
};

/// The server's object set with per-object sizes and load costs.
class ObjectCatalog {
 public:
  /// Registers an object. The load cost defaults to the object's size.
  void add(ObjectId id, Bytes size, std::optional<Bytes> load_cost = {});

  bool contains(ObjectId id) const { return entries_.contains(id); }
  const ObjectInfo& at(ObjectId id) const;
  Bytes size_of(ObjectId id) const { return at(id).size; }
  Bytes load_cost(ObjectId id) const { return at(id).load_cost; }

  std::size_t count() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Bytes total_size() const { return total_size_; }
  std::vector<ObjectId> ids() const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const ObjectCatalog&, const ObjectCatalog&) = default;

 private:
  std::map<ObjectId, ObjectInfo> entries_;
  Bytes total_size_ = 0;
};

struct Update {
  UpdateId id;
  Micros time = 0;
  ObjectId object;
  Bytes ship_cost = 0;

  friend bool operator==(const Update&, const Update&) = default;
};

struct Query {
  QueryId id;
  Micros time = 0;
  std::vector<ObjectId> objects;  // B(q), sorted, no duplicates
  Bytes ship_cost = 0;
  Micros tolerance = 0;  // updates younger than this may be ignored

  friend bool operator==(const Query&, const Query&) = default;
};

/// One trace record. Events are totally ordered by (time, seq).
struct Event {
  std::uint64_t seq = 0;
  std::variant<Query, Update> body;

  bool is_query() const { return std::holds_alternative<Query>(body); }
  const Query& query() const { return std::get<Query>(body); }
  const Update& update() const { return std::get<Update>(body); }
  Micros time() const;

  friend bool operator==(const Event&, const Event&) = default;
};

using Trace = std::vector<Event>;

/// Checks that every event references catalog objects and that the
/// trace is ordered by (time, seq). Throws Error naming the first bad event.
void check_trace(const Trace& trace, const ObjectCatalog& catalog);

// Decisions ----------------------------------------------------------------

struct ShipQuery {
  QueryId query;
  Bytes cost = 0;
  friend bool operator==(const ShipQuery&, const ShipQuery&) = default;
};

struct ShipUpdates {
  std::vector<Update> updates;
  friend bool operator==(const ShipUpdates&, const ShipUpdates&) = default;
};

struct AnswerFromCache {
  QueryId query;
  friend bool operator==(const AnswerFromCache&, const AnswerFromCache&) = default;
};

struct Load {
  ObjectId object;
  friend bool operator==(const Load&, const Load&) = default;
};

struct Evict {
  ObjectId object;
  friend bool operator==(const Evict&, const Evict&) = default;
};

using Decision = std::variant<ShipQuery, ShipUpdates, AnswerFromCache, Load, Evict>;

std::string_view decision_kind(const Decision& d);
std::string describe(const Decision& d);

}  // namespace decouple

template <class Tag>
struct std::hash<decouple::StrongId<Tag>> {
  std::size_t operator()(decouple::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
