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

#include "decouple/cli.hpp"

#include <zlib.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace decouple::cli {

namespace {

namespace fs = std::filesystem;

fs::path out_dir_or_default(const fs::path& dir) {
  if (!dir.empty()) return dir;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

fs::path prepare(const fs::path& dir) {
  const fs::path out = out_dir_or_default(dir);
  fs::create_directories(out);
  return out;
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << bytes;
  if (!f) throw Error("write failed for " + path.string());
}

void write_gzip(const fs::path& path, const std::string& bytes) {
  gzFile f = gzopen(path.string().c_str(), "wb9");
  if (f == nullptr) throw Error("cannot write " + path.string());
  std::size_t done = 0;
  while (done < bytes.size()) {
    const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(bytes.size() - done, 1 << 20));
    if (gzwrite(f, bytes.data() + done, chunk) != static_cast<int>(chunk)) {
      gzclose(f);
      throw Error("write failed for " + path.string());
    }
    done += chunk;
  }
  if (gzclose(f) != Z_OK) throw Error("write failed for " + path.string());
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

bool wants_csv(Format f) { return f != Format::json; }
bool wants_json(Format f) { return f != Format::csv; }

Workload load(const InputArgs& in) {
  LoadedTrace loaded = load_trace(in.trace, in.catalog);
  return Workload{std::move(loaded.catalog), std::move(loaded.trace)};
}

std::vector<RunConfig> configs_for(const CompareArgs& args) {
  std::vector<RunConfig> out;
  for (PolicyKind p : args.policies) {
    RunConfig c = args.base;
    c.policy = p;
    c.label = std::string(to_string(p));
    out.push_back(std::move(c));
  }
  return out;
}

// Final-cost table; `keys` label the rows.
nlohmann::ordered_json table_json(const std::string& key, const std::vector<std::uint64_t>& keys,
                                  const std::vector<ComparisonReport>& reports) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    nlohmann::ordered_json row;
    row[key] = keys[i];
    for (const RunReport& r : reports[i].runs) row[r.label] = r.traffic().total();
    rows.push_back(std::move(row));
  }
  return rows;
}

void print_totals(std::ostream& log, const ComparisonReport& report) {
  for (const RunReport& r : report.runs) {
    log << r.label << ": total " << r.traffic().total() << " bytes (post warm-up "
        << r.post_warmup().total() << ")\n";
  }
}

}  // namespace

void write_granularity_csv(std::ostream& os, const std::vector<std::uint64_t>& granularities,
                           const std::vector<ComparisonReport>& reports) {
  os << "granularity";
  if (!reports.empty()) {
    for (const RunReport& r : reports.front().runs) os << ',' << r.label;
  }
  os << '\n';
  for (std::size_t i = 0; i < granularities.size(); ++i) {
    os << granularities[i];
    for (const RunReport& r : reports[i].runs) os << ',' << r.traffic().total();
    os << '\n';
  }
}

void write_update_sweep_csv(std::ostream& os, const std::vector<std::uint64_t>& scales,
                            const std::vector<std::uint64_t>& update_counts,
                            const std::vector<ComparisonReport>& reports) {
  os << "scale,updates";
  if (!reports.empty()) {
    for (const RunReport& r : reports.front().runs) os << ',' << r.label;
  }
  os << '\n';
  for (std::size_t i = 0; i < scales.size(); ++i) {
    os << scales[i] << ',' << update_counts[i];
    for (const RunReport& r : reports[i].runs) os << ',' << r.traffic().total();
    os << '\n';
  }
}

void cmd_gen(const GenArgs& args, std::ostream& log) {
  const Workload w = generate(args.params, args.seed);
  const fs::path dir = prepare(args.out_dir);
  write_file(dir / "catalog.json", render([&](std::ostream& os) { write_catalog(os, w.catalog); }));
  TraceHeader header;
  header.seed = args.seed;
  header.generator = to_json(args.params);
  const std::string trace =
      render([&](std::ostream& os) { write_trace(os, header, w.trace); });
  const fs::path trace_path = dir / (args.gzip ? "trace.jsonl.gz" : "trace.jsonl");
  if (args.gzip) {
    write_gzip(trace_path, trace);
  } else {
    write_file(trace_path, trace);
  }
  log << "wrote " << w.catalog.count() << " objects and " << w.trace.size() << " events to "
      << dir.string() << '\n';
}

void cmd_run(const RunArgs& args, std::ostream& log) {
  Workload w = load(args.input);
  if (args.granularity) w = repartition(w, *args.granularity, args.config.seed);
  RunConfig config = args.config;
  if (config.label.empty()) config.label = std::string(to_string(config.policy));
  const RunReport report = run(w.trace, w.catalog, config);
  const fs::path dir = prepare(args.out_dir);
  if (wants_csv(args.format)) {
    write_file(dir / (config.label + ".series.csv"),
               render([&](std::ostream& os) { write_series_csv(os, report); }));
  }
  if (wants_json(args.format)) {
    write_file(dir / (config.label + ".summary.json"),
               render([&](std::ostream& os) { write_summary_json(os, report); }));
  }
  if (args.decision_log) {
    write_file(dir / (config.label + ".decisions.log"),
               render([&](std::ostream& os) { write_decision_log(os, report); }));
  }
  log << report.label << ": total " << report.traffic().total() << " bytes, "
      << report.answers_checked << " cache answers audited\n";
}

void cmd_compare(const CompareArgs& args, std::ostream& log) {
  if (args.policies.empty()) throw Error("no policies given");
  const Workload base = load(args.input);
  const fs::path dir = prepare(args.out_dir);
  const std::vector<RunConfig> configs = configs_for(args);

  if (args.granularities.empty()) {
    const ComparisonReport report = compare(base.trace, base.catalog, configs, args.parallel);
    if (wants_csv(args.format)) {
      write_file(dir / "comparison.csv",
                 render([&](std::ostream& os) { write_comparison_csv(os, report); }));
    }
    if (wants_json(args.format)) {
      write_file(dir / "comparison.json",
                 render([&](std::ostream& os) { write_comparison_json(os, report); }));
    }
    print_totals(log, report);
    return;
  }

  std::vector<ComparisonReport> reports;
  for (std::uint64_t g : args.granularities) {
    const Workload w = repartition(base, g, args.base.seed);
    reports.push_back(compare(w.trace, w.catalog, configs, args.parallel));
    log << "granularity " << g << '\n';
    print_totals(log, reports.back());
  }
  if (wants_csv(args.format)) {
    write_file(dir / "granularity.csv", render([&](std::ostream& os) {
                 write_granularity_csv(os, args.granularities, reports);
               }));
  }
  if (wants_json(args.format)) {
    write_file(dir / "granularity.json",
               table_json("granularity", args.granularities, reports).dump(2) + "\n");
  }
}

void cmd_report(const ReportArgs& args, std::ostream& log) {
  const CompareArgs& c = args.compare;
  switch (args.kind) {
    case ReportKind::granularity:
      if (c.granularities.empty()) throw Error("--kind granularity needs --granularity");
      cmd_compare(c, log);
      return;
    case ReportKind::cumulative: {
      const Workload w = load(c.input);
      const ComparisonReport report = compare(w.trace, w.catalog, configs_for(c), c.parallel);
      write_file(prepare(c.out_dir) / "cumulative.csv",
                 render([&](std::ostream& os) { write_comparison_csv(os, report); }));
      print_totals(log, report);
      return;
    }
    case ReportKind::updates: {
      if (args.update_scales.empty()) throw Error("--kind updates needs --update-scales");
      const Workload w = load(c.input);
      std::vector<std::uint64_t> counts;
      std::vector<ComparisonReport> reports;
      for (std::uint64_t s : args.update_scales) {
        const Trace t = scale_updates(w.trace, s);
        counts.push_back(static_cast<std::uint64_t>(
            std::count_if(t.begin(), t.end(), [](const Event& e) { return !e.is_query(); })));
        reports.push_back(compare(t, w.catalog, configs_for(c), c.parallel));
        log << "update scale " << s << '\n';
        print_totals(log, reports.back());
      }
      write_file(prepare(c.out_dir) / "updates.csv", render([&](std::ostream& os) {
                   write_update_sweep_csv(os, args.update_scales, counts, reports);
                 }));
      return;
    }
  }
}

bool cmd_validate(const InputArgs& args, std::ostream& log) {
  const ValidationReport r = validate_trace(args.trace, args.catalog);
  if (!r.ok) {
    log << "invalid: " << r.error << '\n';
    return false;
  }
  log << "ok: " << r.events << " events (" << r.queries << " queries, " << r.updates
      << " updates), query bytes " << r.query_bytes << ", update bytes " << r.update_bytes
      << '\n';
  return true;
}

namespace {

const std::map<std::string, Format> kFormats = {
    {"csv", Format::csv}, {"json", Format::json}, {"all", Format::all}};
const std::map<std::string, UpdateShipping> kShipping = {{"eager", UpdateShipping::eager},
                                                         {"lazy", UpdateShipping::lazy}};
const std::map<std::string, ReportKind> kKinds = {{"cumulative", ReportKind::cumulative},
                                                  {"updates", ReportKind::updates},
                                                  {"granularity", ReportKind::granularity}};

void add_input(CLI::App* app, InputArgs& in) {
  app->add_option("--trace", in.trace, "trace.jsonl or trace.jsonl.gz")->required();
  app->add_option("--catalog", in.catalog, "catalog.json (default: named by the trace header)");
}

// Flags shared by run, compare and report.
struct SimFlags {
  std::optional<double> cache_frac;
  std::optional<Bytes> cache_bytes;
  std::string shipping = "eager";
};

void add_sim(CLI::App* app, RunConfig& cfg, SimFlags& flags) {
  app->add_option("--cache-frac", flags.cache_frac, "cache size as a fraction of the catalog")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--cache-bytes", flags.cache_bytes, "absolute cache size in bytes")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--alpha", cfg.params.alpha, "benefit smoothing factor")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--delta", cfg.params.delta, "benefit window, in events")
      ->check(CLI::PositiveNumber);
  app->add_option("--soptimal-shipping", flags.shipping, "eager or lazy")
      ->check(CLI::IsMember({"eager", "lazy"}));
  app->add_option("--warmup", cfg.options.warmup_events, "warm-up prefix, in events");
  app->add_option("--stride", cfg.options.sample_stride, "series sampling stride, in events")
      ->check(CLI::PositiveNumber);
}

void finish_sim(RunConfig& cfg, const SimFlags& flags) {
  if (flags.cache_frac && flags.cache_bytes) {
    throw CLI::ValidationError("--cache-frac and --cache-bytes are mutually exclusive");
  }
  if (flags.cache_frac) {
    if (*flags.cache_frac <= 0.0) throw CLI::ValidationError("--cache-frac must be in (0,1]");
    cfg.capacity.fraction = *flags.cache_frac;
  }
  if (flags.cache_bytes) cfg.capacity.bytes = *flags.cache_bytes;
  cfg.params.soptimal_shipping = kShipping.at(flags.shipping);
}

std::vector<PolicyKind> parse_policies(const std::vector<std::string>& names) {
  std::vector<PolicyKind> out;
  for (const std::string& n : names) out.push_back(parse_policy(n));
  return out;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trace-driven simulator for middleware caches that decouple data"};
  app.name("decouple");
  app.require_subcommand(1);

  GenArgs gen;
  std::string format = "all";
  std::string out_dir;

  auto* g = app.add_subcommand("gen", "generate a synthetic catalog and trace");
  g->add_option("--seed", gen.seed, "random seed")->required();
  g->add_option("--objects", gen.params.n_objects, "number of objects")->check(CLI::PositiveNumber);
  g->add_option("--queries", gen.params.n_queries, "number of queries");
  g->add_option("--updates", gen.params.n_updates, "number of updates");
  g->add_option("--update-fraction", gen.params.update_fraction, "update cost / object size");
  g->add_option("--mean-interarrival", gen.params.mean_interarrival, "microseconds");
  std::optional<std::string> params_file;
  g->add_option("--params", params_file, "JSON file with generator parameters")
      ->check(CLI::ExistingFile);
  g->add_flag("--gzip", gen.gzip, "write trace.jsonl.gz");
  g->add_option("--out", out_dir, "output directory");

  RunArgs runa;
  SimFlags run_flags;
  std::string policy;
  auto* r = app.add_subcommand("run", "run one policy over a trace");
  add_input(r, runa.input);
  r->add_option("--policy", policy, "vcover, benefit, nocache, replica or soptimal")->required();
  r->add_option("--seed", runa.config.seed, "policy seed")->required();
  r->add_option("--label", runa.config.label, "run label (default: policy name)");
  r->add_option("--granularity", runa.granularity, "re-partition onto this many objects")
      ->check(CLI::PositiveNumber);
  r->add_flag("--decision-log", runa.decision_log, "also write the decision log");
  add_sim(r, runa.config, run_flags);

  CompareArgs cmp;
  SimFlags cmp_flags;
  std::vector<std::string> policies = {"vcover", "benefit", "nocache", "replica", "soptimal"};
  bool serial = false;
  auto add_compare = [&](CLI::App* sub) {
    add_input(sub, cmp.input);
    sub->add_option("--policies", policies, "comma-separated policy list")->delimiter(',');
    sub->add_option("--seed", cmp.base.seed, "policy seed");
    sub->add_option("--granularity", cmp.granularities, "comma-separated object counts")
        ->delimiter(',');
    sub->add_flag("--serial", serial, "run policies one after another");
    add_sim(sub, cmp.base, cmp_flags);
  };
  auto* c = app.add_subcommand("compare", "run several policies over the same trace");
  add_compare(c);

  ReportArgs rep;
  std::string kind = "cumulative";
  auto* p = app.add_subcommand("report", "emit plot-ready CSV");
  add_compare(p);
  p->add_option("--kind", kind, "cumulative, updates or granularity")
      ->check(CLI::IsMember({"cumulative", "updates", "granularity"}));
  p->add_option("--update-scales", rep.update_scales, "update multiplicities, e.g. 1,2,3")
      ->delimiter(',');

  InputArgs val;
  auto* v = app.add_subcommand("validate", "check a trace against its catalog");
  add_input(v, val);

  for (CLI::App* sub : {r, c, p}) {
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "csv, json or all")
        ->check(CLI::IsMember({"csv", "json", "all"}));
  }

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
    if (*g) {
      if (params_file) {
        std::ifstream f(*params_file);
        const GeneratorParams from_file = generator_params_from_json(nlohmann::json::parse(f));
        // Explicit flags override the file.
        GeneratorParams merged = from_file;
        if (g->count("--objects")) merged.n_objects = gen.params.n_objects;
        if (g->count("--queries")) merged.n_queries = gen.params.n_queries;
        if (g->count("--updates")) merged.n_updates = gen.params.n_updates;
        if (g->count("--update-fraction")) merged.update_fraction = gen.params.update_fraction;
        if (g->count("--mean-interarrival")) merged.mean_interarrival = gen.params.mean_interarrival;
        gen.params = merged;
      }
      gen.out_dir = out_dir;
      cmd_gen(gen, out);
    } else if (*r) {
      runa.config.policy = parse_policy(policy);
      finish_sim(runa.config, run_flags);
      runa.out_dir = out_dir;
      runa.format = kFormats.at(format);
      cmd_run(runa, out);
    } else if (*c || *p) {
      finish_sim(cmp.base, cmp_flags);
      cmp.policies = parse_policies(policies);
      cmp.out_dir = out_dir;
      cmp.format = kFormats.at(format);
      cmp.parallel = !serial;
      if (*c) {
        cmd_compare(cmp, out);
      } else {
        rep.compare = cmp;
        rep.kind = kKinds.at(kind);
        cmd_report(rep, out);
      }
    } else if (*v) {
      return cmd_validate(val, out) ? 0 : 1;
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const AuditError& e) {
    err << "audit failed at event " << e.event_index() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace decouple::cli
