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

#include <zlib.h>

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "decouple/workload.hpp"

namespace decouple {

namespace {

constexpr const char* kCatalogSchema = "decouple.catalog/1";
constexpr const char* kTraceSchema = "decouple.trace/1";

std::string with_line(std::uint64_t line, const std::string& what) {
  return line == 0 ? what : "line " + std::to_string(line) + ": " + what;
}

template <class T>
T field(const nlohmann::json& j, const char* key, std::uint64_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw TraceError(line, std::string("missing field \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw TraceError(line, std::string("field \"") + key + "\" has the wrong type");
  }
}

std::int64_t non_negative(const nlohmann::json& j, const char* key, std::uint64_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw TraceError(line, std::string("missing field \"") + key + "\"");
  if (!it->is_number_integer()) {
    throw TraceError(line, std::string("field \"") + key + "\" must be an integer");
  }
  if (it->is_number_unsigned()) {
    const auto v = it->get<std::uint64_t>();
    if (v > static_cast<std::uint64_t>(INT64_MAX)) {
      throw TraceError(line, std::string("field \"") + key + "\" is out of range");
    }
    return static_cast<std::int64_t>(v);
  }
  const auto v = it->get<std::int64_t>();
  if (v < 0) throw TraceError(line, std::string("field \"") + key + "\" is negative");
  return v;
}

std::uint64_t unsigned_field(const nlohmann::json& j, const char* key, std::uint64_t line) {
  return static_cast<std::uint64_t>(non_negative(j, key, line));
}

TraceHeader parse_header(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceError(1, std::string("malformed header: ") + e.what());
  }
  if (!j.is_object()) throw TraceError(1, "header is not an object");
  TraceHeader h;
  h.schema = field<std::string>(j, "schema", 1);
  if (h.schema != kTraceSchema) throw TraceError(1, "unsupported trace schema \"" + h.schema + "\"");
  if (j.contains("catalog")) h.catalog = field<std::string>(j, "catalog", 1);
  if (j.contains("seed") && !j["seed"].is_null()) h.seed = unsigned_field(j, "seed", 1);
  if (j.contains("generator")) h.generator = j["generator"];
  return h;
}

// Tracks the ordering and identity rules a trace must satisfy.
class TraceChecker {
 public:
  explicit TraceChecker(const ObjectCatalog& catalog) : catalog_(&catalog) {}

  void check(const Event& ev, std::uint64_t line) {
    if (any_ && ev.seq <= last_seq_) throw TraceError(line, "seq does not increase");
    if (any_ && ev.time() < last_time_) throw TraceError(line, "time goes backwards");
    any_ = true;
    last_seq_ = ev.seq;
    last_time_ = ev.time();
    if (ev.is_query()) {
      const Query& q = ev.query();
      if (!queries_.insert(q.id).second) throw TraceError(line, "duplicate query id");
      for (ObjectId o : q.objects) {
        if (!catalog_->contains(o)) {
          throw TraceError(line, "unknown object " + std::to_string(o.value));
        }
      }
    } else {
      const Update& u = ev.update();
      if (!updates_.insert(u.id).second) throw TraceError(line, "duplicate update id");
      if (!catalog_->contains(u.object)) {
        throw TraceError(line, "unknown object " + std::to_string(u.object.value));
      }
    }
  }

 private:
  const ObjectCatalog* catalog_;
  bool any_ = false;
  std::uint64_t last_seq_ = 0;
  Micros last_time_ = 0;
  std::set<QueryId> queries_;
  std::set<UpdateId> updates_;
};

std::filesystem::path catalog_for(const std::filesystem::path& trace_path, const TraceHeader& h,
                                  const std::optional<std::filesystem::path>& override_path) {
  if (override_path) return *override_path;
  std::filesystem::path p(h.catalog);
  if (p.is_relative()) p = trace_path.parent_path() / p;
  return p;
}

}  // namespace

TraceError::TraceError(std::uint64_t line, const std::string& what)
    : Error(with_line(line, what)), line_(line) {}

void write_catalog(std::ostream& os, const ObjectCatalog& catalog) {
  nlohmann::ordered_json j;
  j["schema"] = kCatalogSchema;
  j["objects"] = nlohmann::ordered_json::array();
  for (const auto& [id, info] : catalog) {
    nlohmann::ordered_json o;
    o["id"] = id.value;
    o["size"] = info.size;
    o["load_cost"] = info.load_cost;
    j["objects"].push_back(std::move(o));
  }
  os << j.dump(1) << '\n';
}

ObjectCatalog read_catalog(std::istream& is) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("malformed catalog: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != kCatalogSchema) {
      throw Error("unsupported catalog schema \"" + j.at("schema").get<std::string>() + "\"");
    }
    ObjectCatalog catalog;
    for (const auto& o : j.at("objects")) {
      std::optional<Bytes> load_cost;
      if (o.contains("load_cost")) load_cost = o.at("load_cost").get<Bytes>();
      catalog.add(ObjectId{o.at("id").get<std::uint64_t>()}, o.at("size").get<Bytes>(), load_cost);
    }
    return catalog;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed catalog: ") + e.what());
  }
}

ObjectCatalog read_catalog_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open catalog " + path.string());
  return read_catalog(in);
}

void write_trace(std::ostream& os, const TraceHeader& header, const Trace& trace) {
  nlohmann::ordered_json h;
  h["schema"] = header.schema;
  h["catalog"] = header.catalog;
  if (header.seed) h["seed"] = *header.seed;
  h["generator"] = header.generator;
  os << h.dump() << '\n';
  for (const Event& ev : trace) {
    nlohmann::ordered_json j;
    j["seq"] = ev.seq;
    if (ev.is_query()) {
      const Query& q = ev.query();
      j["type"] = "query";
      j["id"] = q.id.value;
      j["time"] = q.time;
      auto& objects = j["objects"] = nlohmann::ordered_json::array();
      for (ObjectId o : q.objects) objects.push_back(o.value);
      j["cost"] = q.ship_cost;
      j["tolerance"] = q.tolerance;
    } else {
      const Update& u = ev.update();
      j["type"] = "update";
      j["id"] = u.id.value;
      j["time"] = u.time;
      j["object"] = u.object.value;
      j["cost"] = u.ship_cost;
    }
    os << j.dump() << '\n';
  }
}

Event parse_event(const std::string& text, std::uint64_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw TraceError(line, "record is not an object");
  Event ev;
  ev.seq = unsigned_field(j, "seq", line);
  const auto type = field<std::string>(j, "type", line);
  if (type == "query") {
    Query q;
    q.id = QueryId{unsigned_field(j, "id", line)};
    q.time = non_negative(j, "time", line);
    q.ship_cost = non_negative(j, "cost", line);
    q.tolerance = non_negative(j, "tolerance", line);
    const auto it = j.find("objects");
    if (it == j.end() || !it->is_array() || it->empty()) {
      throw TraceError(line, "field \"objects\" must be a non-empty array");
    }
    for (const auto& o : *it) {
      if (!o.is_number_unsigned()) throw TraceError(line, "object ids must be non-negative integers");
      q.objects.push_back(ObjectId{o.get<std::uint64_t>()});
    }
    for (std::size_t i = 1; i < q.objects.size(); ++i) {
      if (!(q.objects[i - 1] < q.objects[i])) {
        throw TraceError(line, "field \"objects\" must be sorted and unique");
      }
    }
    ev.body = std::move(q);
  } else if (type == "update") {
    Update u;
    u.id = UpdateId{unsigned_field(j, "id", line)};
    u.time = non_negative(j, "time", line);
    u.object = ObjectId{unsigned_field(j, "object", line)};
    u.ship_cost = non_negative(j, "cost", line);
    ev.body = u;
  } else {
    throw TraceError(line, "unknown event type \"" + type + "\"");
  }
  return ev;
}

struct TraceReader::GzFile {
  gzFile handle = nullptr;
  ~GzFile() {
    if (handle) gzclose(handle);
  }
};

TraceReader::TraceReader(const std::filesystem::path& path) : file_(std::make_unique<GzFile>()) {
  // gzopen reads uncompressed files transparently.
  file_->handle = gzopen(path.string().c_str(), "rb");
  if (!file_->handle) throw Error("cannot open trace " + path.string());
  std::string first;
  if (!read_line(first)) throw TraceError(1, "empty trace file");
  header_ = parse_header(first);
}

TraceReader::~TraceReader() = default;

bool TraceReader::read_line(std::string& out) {
  out.clear();
  char buf[8192];
  bool got = false;
  while (gzgets(file_->handle, buf, sizeof buf) != nullptr) {
    got = true;
    out += buf;
    if (!out.empty() && out.back() == '\n') break;
  }
  if (!got) {
    int err = 0;
    const char* msg = gzerror(file_->handle, &err);
    if (err != Z_OK && err != Z_STREAM_END) {
      throw TraceError(line_ + 1, std::string("read error: ") + msg);
    }
    return false;
  }
  ++line_;
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return true;
}

std::optional<Event> TraceReader::next() {
  std::string text;
  while (read_line(text)) {
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    return parse_event(text, line_);
  }
  return std::nullopt;
}

LoadedTrace load_trace(const std::filesystem::path& trace_path,
                       const std::optional<std::filesystem::path>& catalog_path) {
  TraceReader reader(trace_path);
  LoadedTrace out;
  out.header = reader.header();
  out.catalog = read_catalog_file(catalog_for(trace_path, out.header, catalog_path));
  TraceChecker checker(out.catalog);
  while (auto ev = reader.next()) {
    checker.check(*ev, reader.line());
    out.trace.push_back(std::move(*ev));
  }
  return out;
}

ValidationReport validate_trace(const std::filesystem::path& trace_path,
                                const std::optional<std::filesystem::path>& catalog_path) {
  ValidationReport report;
  try {
    TraceReader reader(trace_path);
    const ObjectCatalog catalog =
        read_catalog_file(catalog_for(trace_path, reader.header(), catalog_path));
    TraceChecker checker(catalog);
    while (auto ev = reader.next()) {
      checker.check(*ev, reader.line());
      ++report.events;
      if (ev->is_query()) {
        ++report.queries;
        report.query_bytes += ev->query().ship_cost;
      } else {
        ++report.updates;
        report.update_bytes += ev->update().ship_cost;
      }
    }
    report.ok = true;
  } catch (const Error& e) {
    report.error = e.what();
  }
  return report;
}

}  // namespace decouple
