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
 * @file cli.hpp
 * @brief The `decouple` command line.
 *
 *   decouple gen      --seed N [--objects --queries --updates ...] [--out DIR]
 *   decouple run      --trace F --policy P --seed N [--cache-frac F] [--out DIR]
 *   decouple compare  --trace F --policies a,b,... [--granularity 10,68,...]
 *   decouple report   --trace F --kind cumulative|updates|granularity
 *   decouple validate --trace F [--catalog F]
 *
 * Output files land in --out, else $DECOUPLE_OUT_DIR, else the working
 * directory. Exit codes: 0 success, 1 invalid input or flags, 2 audit failure.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "decouple/simharness.hpp"
#include "decouple/workload.hpp"

namespace decouple::cli {

inline constexpr const char* kOutDirEnv = "DECOUPLE_OUT_DIR";

enum class Format { csv, json, all };

struct GenArgs {
  GeneratorParams params;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  bool gzip = false;
};

struct InputArgs {
  std::filesystem::path trace;
  std::optional<std::filesystem::path> catalog;
};

struct RunArgs {
  InputArgs input;
  RunConfig config;
  std::optional<std::uint64_t> granularity;
  std::filesystem::path out_dir;
  Format format = Format::all;
  bool decision_log = false;
};

struct CompareArgs {
  InputArgs input;
  std::vector<PolicyKind> policies;
  RunConfig base;  // policy and label are filled per run
  std::vector<std::uint64_t> granularities;
  std::filesystem::path out_dir;
  Format format = Format::all;
  bool parallel = true;
};

enum class ReportKind { cumulative, updates, granularity };

struct ReportArgs {
  CompareArgs compare;
  ReportKind kind = ReportKind::cumulative;
  std::vector<std::uint64_t> update_scales = {1, 2, 3};
};

/// Each command writes files and a short summary to `log`. They throw
/// Error (or AuditError) on failure.
void cmd_gen(const GenArgs& args, std::ostream& log);
void cmd_run(const RunArgs& args, std::ostream& log);
void cmd_compare(const CompareArgs& args, std::ostream& log);
void cmd_report(const ReportArgs& args, std::ostream& log);
/// Returns false when the trace is invalid.
bool cmd_validate(const InputArgs& args, std::ostream& log);

/// Final cost table for the granularity sweep: granularity,<label>...
void write_granularity_csv(std::ostream& os, const std::vector<std::uint64_t>& granularities,
                           const std::vector<ComparisonReport>& reports);
/// Final cost table for the update sweep: scale,updates,<label>...
void write_update_sweep_csv(std::ostream& os, const std::vector<std::uint64_t>& scales,
                            const std::vector<std::uint64_t>& update_counts,
                            const std::vector<ComparisonReport>& reports);

/// Parses argv and dispatches. Never throws; returns the exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace decouple::cli
