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

// Cross-engine comparison, ordering verdicts and the oracle gate.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ogre/bench/run.hpp"

namespace ogre::bench {

// Adjacent engines in a verdict must differ by at least this factor in
// median wall time to count as ordered.
inline constexpr double kOrderingGap = 1.20;
inline constexpr int kRepetitions = 3;

struct CompareConfig {
  std::vector<std::string> scenarios;
  std::vector<engines::EngineKind> engines;
  int repetitions = kRepetitions;
  RunConfig base;  // topology, seed and engine flags shared by every cell
  bool per_engine_defaults = true;  // scheduler and store from each engine's defaults
};

struct Cell {
  std::string scenario;
  engines::EngineKind engine = engines::EngineKind::mapreduce;
  std::vector<double> wall_seconds;
  double median_seconds = 0.0;
  bool complete = true;
};

struct Verdict {
  std::string scenario;
  // "ordered": every adjacent gap >= kOrderingGap; "inconclusive": some gap is
  // smaller; "incomplete": a cell failed.
  std::string status;
  std::vector<engines::EngineKind> fastest_first;
  std::vector<double> gaps;  // slower / faster, per adjacent pair
  std::string line;          // e.g. "i-small: mpi-like < iterative < mapreduce"
};

struct Comparison {
  std::vector<RunReport> reports;
  std::vector<Cell> cells;
  std::vector<Verdict> verdicts;
  bool complete() const noexcept;
};

double median(std::vector<double> values);

// Pure function of the reports; `report` recomputes it offline.
Comparison summarize(std::vector<RunReport> reports);
Comparison compare(const CompareConfig& config);

// True when `order` (fastest first) holds with every adjacent median gap at
// least kOrderingGap. Engines missing from the cells make it false.
bool ordering_holds(const Comparison& comparison, const std::string& scenario,
                    const std::vector<engines::EngineKind>& order);

std::string comparison_csv(const Comparison& comparison);
std::string bundle_json(const Comparison& comparison);
Comparison bundle_from_json(std::string_view text);
// gnuplot data: one block per scenario, one row per engine.
std::string gnuplot_data(const Comparison& comparison);

// Writes comparison.csv, bundle.json and runtime.dat into `dir`.
void write_comparison(const Comparison& comparison, const std::filesystem::path& dir);

struct EngineCheck {
  engines::EngineKind engine = engines::EngineKind::mapreduce;
  sched::SchedulerKind scheduler = sched::SchedulerKind::multilevel;
  bool pass = false;
  std::uint64_t iterations = 0;
  std::optional<kernel::Divergence> divergence;
  std::string error;
};

struct VerifyConfig {
  std::string scenario_name;
  dataset::ScenarioSpec scenario;
  fabric::ClusterTopology topology;
  std::vector<engines::EngineKind> engines{std::begin(engines::kAllEngines),
                                           std::end(engines::kAllEngines)};
  double tolerance = 1e-9;
  bool inject_assignment_fault = false;
};

inline constexpr std::uint64_t kVerifyMaxPoints = 100'000;

// Every engine in deterministic mode against run_reference.
std::vector<EngineCheck> verify(const VerifyConfig& config);

}  // namespace ogre::bench
