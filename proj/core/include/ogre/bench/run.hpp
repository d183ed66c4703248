// Copyright 2026 The ogrebench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Benchmark harness: the scaled scenario registry, run configuration, run
// execution and the machine-readable run report.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ogre/dataset/dataset.hpp"
#include "ogre/engines/engine.hpp"

namespace ogre::bench {

inline constexpr std::string_view kReportSchema = "ogrebench.run/1";
inline constexpr std::string_view kBundleSchema = "ogrebench.bundle/1";

struct Scenario {
  std::string name;
  dataset::ScenarioSpec spec;
};

// i-tiny, i-small, ii-small, iii-small. Constant n*k, points 1:10:100.
const std::vector<Scenario>& scenarios();
std::optional<Scenario> find_scenario(std::string_view name);

enum class OutputFormat { json, csv };

std::string_view store_mode_name(store::StoreMode mode) noexcept;
std::optional<store::StoreMode> parse_store_mode(std::string_view name) noexcept;
std::string_view algorithm_name(collectives::Algorithm a) noexcept;  // tree, rdouble
std::optional<collectives::Algorithm> parse_algorithm(std::string_view name) noexcept;

// Mapreduce and pilot read their input per iteration from the store they
// model: colocated for mapreduce, shared for pilot.
store::StoreMode default_store(engines::EngineKind engine) noexcept;

struct RunConfig {
  std::string scenario_name;  // "custom" when given by size
  dataset::ScenarioSpec scenario;
  fabric::ClusterTopology topology;
  engines::EngineKind engine = engines::EngineKind::message_passing;
  sched::SchedulerKind scheduler = sched::SchedulerKind::centralized;
  store::StoreMode store_mode = store::StoreMode::colocated;
  std::uint32_t replication = 3;
  engines::EngineOptions options;  // options.scheduler mirrors `scheduler`
  std::filesystem::path input;  // point file to load; empty: generate
  std::filesystem::path output;
  OutputFormat format = OutputFormat::json;

  // Defaults for an engine: its scheduler and store.
  static RunConfig for_engine(engines::EngineKind engine, const Scenario& scenario);

  // Throws Error(invalid_argument) on a bad or incompatible configuration.
  void validate() const;
};

struct IterationRow {
  std::uint64_t iteration = 0;
  double seconds = 0.0;
  fabric::MetricsRecord delta;
};

struct RunReport {
  RunConfig config;
  bool ok = false;
  std::string error;
  std::uint64_t iterations = 0;
  bool converged = false;
  double objective = 0.0;
  std::uint32_t trajectory_crc = 0;  // CRC-32 of the encoded trajectory
  double wall_seconds = 0.0;         // engine only
  double total_seconds = 0.0;        // including generation and ingest
  fabric::MetricsRecord metrics;
  fabric::MetricsRecord load;
  std::uint64_t ingest_bytes = 0;
  std::uint64_t intermediate_files = 0;
  std::vector<IterationRow> per_iteration;
  kernel::KMeansResult result;  // not serialized
};

// Generate, ingest, run, summarize. Engine failures come back as a report
// with ok == false; configuration errors throw.
RunReport execute(const RunConfig& config);

std::string to_json(const RunReport& report, int indent = 2);
RunReport report_from_json(std::string_view text);
// Empty when `text` is a well-formed run report of the current schema.
std::vector<std::string> schema_errors(std::string_view text);

std::string csv_header();
std::string csv_row(const RunReport& report);

std::uint32_t trajectory_crc(const kernel::KMeansResult& result);

}  // namespace ogre::bench
