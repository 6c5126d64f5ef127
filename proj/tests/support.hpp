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

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "decouple/types.hpp"

namespace decouple::testing {

inline ObjectCatalog catalog_of(std::initializer_list<Bytes> sizes) {
  ObjectCatalog c;
  std::uint64_t id = 1;
  for (Bytes s : sizes) c.add(ObjectId{id++}, s);
  return c;
}

/// Appends events with increasing seq; ids are supplied by the caller.
class TraceBuilder {
 public:
  TraceBuilder& query(std::uint64_t id, Micros time, std::vector<std::uint64_t> objects,
                      Bytes cost, Micros tolerance = 0) {
    Query q;
    q.id = QueryId{id};
    q.time = time;
    for (std::uint64_t o : objects) q.objects.push_back(ObjectId{o});
    q.ship_cost = cost;
    q.tolerance = tolerance;
    trace_.push_back(Event{seq_++, q});
    return *this;
  }

  TraceBuilder& update(std::uint64_t id, Micros time, std::uint64_t object, Bytes cost) {
    trace_.push_back(Event{seq_++, Update{UpdateId{id}, time, ObjectId{object}, cost}});
    return *this;
  }

  Trace build() const { return trace_; }

 private:
  Trace trace_;
  std::uint64_t seq_ = 0;
};

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(DECOUPLE_FIXTURES) / name;
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::path(DECOUPLE_SCRATCH) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace decouple::testing
