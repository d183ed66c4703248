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

// The four K-means execution models. Each engine runs the same kernel on a
// Testbed whose store already holds the dataset, and differs only in how work
// is scheduled, how data is held and how partial results move.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "ogre/collectives/collectives.hpp"
#include "ogre/dataset/dataset.hpp"
#include "ogre/fabric/cluster.hpp"
#include "ogre/fabric/metrics.hpp"
#include "ogre/kernel/kmeans.hpp"
#include "ogre/sched/centralized.hpp"
#include "ogre/sched/decentral.hpp"
#include "ogre/sched/kind.hpp"
#include "ogre/sched/multilevel.hpp"
#include "ogre/store/block_store.hpp"

namespace ogre::engines {

enum class EngineKind { mapreduce, iterative_collective, message_passing, pilot_mapreduce };

inline constexpr EngineKind kAllEngines[] = {EngineKind::mapreduce, EngineKind::iterative_collective,
                                             EngineKind::message_passing,
                                             EngineKind::pilot_mapreduce};

// CLI names: mapreduce, iterative, mpi-like, pilot.
std::string_view engine_name(EngineKind kind) noexcept;
std::optional<EngineKind> parse_engine(std::string_view name) noexcept;

// iterative needs multilevel, mpi-like needs centralized, pilot runs over
// centralized or multilevel; mapreduce runs anywhere.
bool compatible(EngineKind engine, sched::SchedulerKind scheduler) noexcept;
// Throws invalid_argument when incompatible.
void check_compatible(EngineKind engine, sched::SchedulerKind scheduler);
sched::SchedulerKind default_scheduler(EngineKind engine) noexcept;

struct EngineOptions {
  sched::SchedulerKind scheduler = sched::SchedulerKind::multilevel;
  std::uint32_t reducers = 0;  // 0: one per node
  std::uint64_t spill_threshold_bytes = 1ull << 20;
  std::chrono::milliseconds job_launch{200};
  std::chrono::microseconds cu_launch{5000};
  bool compress = false;
  bool combine = false;
  bool deterministic = true;
  collectives::Algorithm collective = collectives::Algorithm::tree;
  std::uint32_t ranks_per_node = 0;  // 0: one per core
  std::filesystem::path workdir;     // empty: default_workdir()
  // Test hook: point 0 goes to the wrong centroid in iteration 1.
  bool inject_assignment_fault = false;
};

struct TestbedConfig {
  fabric::ClusterTopology topology;
  store::StoreConfig store;
  std::uint32_t locality_wait_rounds = sched::ResourceManagerCore::kDefaultLocalityWait;
  std::uint32_t decentral_sample = sched::DecentralizedScheduler::kDefaultSample;
  std::uint64_t seed = 42;
};

// One simulated cluster with its store and schedulers; one per run.
class Testbed {
 public:
  explicit Testbed(TestbedConfig config);
  ~Testbed();
  Testbed(const Testbed&) = delete;
  Testbed& operator=(const Testbed&) = delete;

  const TestbedConfig& config() const noexcept { return config_; }
  fabric::Cluster& cluster() noexcept { return *cluster_; }
  store::BlockStore& store() noexcept { return *store_; }
  sched::CentralizedScheduler& centralized() noexcept { return *centralized_; }
  sched::ResourceManager& resource_manager() noexcept { return *rm_; }
  sched::DecentralizedScheduler& decentral() noexcept { return *decentral_; }

  // block_points 0 means ceil(n / total_slots).
  const store::BlockMap& ingest(const dataset::PointFile& file, std::uint64_t block_points = 0);

 private:
  TestbedConfig config_;
  std::unique_ptr<fabric::Cluster> cluster_;
  std::unique_ptr<store::BlockStore> store_;
  std::unique_ptr<sched::CentralizedScheduler> centralized_;
  std::unique_ptr<sched::ResourceManager> rm_;
  std::unique_ptr<sched::DecentralizedScheduler> decentral_;
};

struct KMeansJob {
  kernel::CentroidSet initial;
  std::uint64_t max_iter = 10;
  double epsilon = 1e-4;
};

struct IterationStats {
  std::uint64_t iteration = 0;
  double seconds = 0.0;
  fabric::MetricsRecord delta;
};

struct EngineRun {
  EngineKind engine = EngineKind::mapreduce;
  sched::SchedulerKind scheduler = sched::SchedulerKind::multilevel;
  kernel::KMeansResult result;
  fabric::MetricsRecord metrics;  // engine run only; ingest excluded
  fabric::MetricsRecord load;     // one-time load before the first iteration
  std::vector<IterationStats> iterations;
  double wall_seconds = 0.0;
  std::uint64_t intermediate_files = 0;
};

EngineRun run_engine(EngineKind engine, Testbed& testbed, const KMeansJob& job,
                     const EngineOptions& options);

EngineRun run_mapreduce(Testbed& testbed, const KMeansJob& job, const EngineOptions& options);
EngineRun run_iterative_collective(Testbed& testbed, const KMeansJob& job,
                                   const EngineOptions& options);
EngineRun run_message_passing(Testbed& testbed, const KMeansJob& job, const EngineOptions& options);
EngineRun run_pilot_mapreduce(Testbed& testbed, const KMeansJob& job, const EngineOptions& options);

}  // namespace ogre::engines
