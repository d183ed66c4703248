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

// Pilot overlay: one placeholder allocation from the system scheduler, then
// compute units (CUs) are scheduled onto its slots by the pilot itself with
// no further resource-manager traffic.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "ogre/fabric/cluster.hpp"
#include "ogre/sched/centralized.hpp"
#include "ogre/sched/multilevel.hpp"

namespace ogre::sched {

struct PilotOptions {
  std::chrono::microseconds cu_launch{5000};
  std::string app_id = "pilot";
};

class Pilot {
 public:
  // Gang of `nodes` whole nodes; one slot per core.
  static std::unique_ptr<Pilot> acquire(fabric::Cluster& cluster,
                                        CentralizedScheduler& scheduler,
                                        std::uint32_t nodes, PilotOptions options = {});
  // nodes * cores_per_node single-core containers, held until shutdown.
  static std::unique_ptr<Pilot> acquire(fabric::Cluster& cluster, ResourceManager& rm,
                                        std::uint32_t nodes, PilotOptions options = {});

  ~Pilot();
  Pilot(const Pilot&) = delete;
  Pilot& operator=(const Pilot&) = delete;

  // Queues a CU; CUs start in submission order on the lowest free slot.
  std::future<fabric::TaskResult> submit_cu(fabric::TaskSpec spec, fabric::TaskBody body,
                                            std::uint32_t cores = 1);
  void wait_idle();
  // Waits for queued CUs, then returns the allocation.
  void shutdown();

  std::size_t slots() const noexcept { return slot_nodes_.size(); }
  const std::vector<fabric::NodeId>& slot_nodes() const noexcept { return slot_nodes_; }
  std::uint64_t completed() const;
  std::vector<std::uint64_t> start_order() const;

 private:
  struct Queued {
    fabric::TaskSpec spec;
    fabric::TaskBody body;
    std::shared_ptr<std::promise<fabric::TaskResult>> done;
  };

  Pilot(fabric::Cluster& cluster, std::vector<fabric::NodeId> slot_nodes,
        std::function<void()> release, PilotOptions options);
  void dispatch_locked();
  void finished(std::size_t slot);

  fabric::Cluster& cluster_;
  std::vector<fabric::NodeId> slot_nodes_;
  std::function<void()> release_;
  PilotOptions options_;

  mutable std::mutex mu_;
  std::condition_variable idle_cv_;
  std::deque<Queued> queue_;
  std::set<std::size_t> free_slots_;
  std::size_t running_ = 0;
  std::uint64_t completed_ = 0;
  std::vector<std::uint64_t> start_order_;
  bool closed_ = false;
};

}  // namespace ogre::sched
