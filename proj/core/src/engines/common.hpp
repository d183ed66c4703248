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

// Plumbing shared by the engine drivers. Not installed.

#pragma once

#include <chrono>
#include <cstdint>
#include <future>
#include <mutex>
#include <span>
#include <string_view>
#include <vector>

#include "ogre/codec.hpp"
#include "ogre/engines/engine.hpp"

namespace ogre::engines::detail {

inline constexpr fabric::NodeId kDriverNode = 0;
inline constexpr std::uint32_t kDriverPort = 1;
inline constexpr std::uint32_t kMapOutputPort = 900;
inline constexpr std::uint32_t kReducerPortBase = 1000;
inline constexpr std::uint32_t kWorkerPortBase = 2000;

// Per-iteration wall time and counter deltas. start() closes the load window.
// Deltas are snapshots at one worker's boundary; traffic from peers still
// finishing the same collective may land in the next row.
class IterationClock {
 public:
  explicit IterationClock(fabric::Metrics& metrics);
  void start();
  void mark(std::uint64_t iteration);
  fabric::MetricsRecord load() const;
  std::vector<IterationStats> stats() const;

 private:
  fabric::Metrics& metrics_;
  mutable std::mutex mu_;
  fabric::MetricsRecord origin_;
  fabric::MetricsRecord last_;
  fabric::MetricsRecord load_;
  std::chrono::steady_clock::time_point last_time_;
  std::vector<IterationStats> stats_;
};

inline std::size_t apply_fault(std::size_t best, std::uint64_t iteration, std::uint64_t point,
                               std::size_t k, bool enabled) noexcept {
  return enabled && iteration == 1 && point == 0 && k > 1 ? (best + 1) % k : best;
}

// Only centroids with members: u32 count, then {u32 key, d f64, u64 count}.
Bytes encode_sparse(const kernel::PartialSums& sums);
// Copies the entries into `into`; entries from different parts never overlap.
void scatter_sparse(std::span<const std::byte> bytes, kernel::PartialSums& into);

Bytes encode_trajectory(const kernel::KMeansResult& result);
kernel::KMeansResult decode_trajectory(std::span<const std::byte> bytes);

// Waits for every task, then throws run_failure naming the first failure.
void await_all(std::vector<std::future<fabric::TaskResult>>& futures, std::string_view what);

std::uint32_t reducer_count(const EngineOptions& options, const fabric::ClusterTopology& topology);

// Run-level bookkeeping: metric baseline, wall clock, final assembly.
class RunFrame {
 public:
  RunFrame(Testbed& testbed, EngineKind engine, const EngineOptions& options,
           const KMeansJob& job);
  IterationClock& clock() noexcept { return clock_; }
  EngineRun finish(kernel::KMeansResult result);

 private:
  Testbed& testbed_;
  EngineKind engine_;
  sched::SchedulerKind scheduler_;
  fabric::MetricsRecord before_;
  std::chrono::steady_clock::time_point start_;
  IterationClock clock_;
};

}  // namespace ogre::engines::detail
