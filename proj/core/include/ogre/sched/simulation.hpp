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

// Virtual-time replay of a task workload through the real scheduler cores.
// Tasks never run; each grant just advances a clock, so utilization is exact
// and independent of host speed.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ogre/fabric/cluster.hpp"
#include "ogre/sched/kind.hpp"

namespace ogre::sched {

struct SimApp {
  std::string name;
  std::uint32_t tasks = 1;
  double task_seconds = 1.0;
  // Centralized: one gang job of `nodes` nodes runs every task. When false,
  // each task is its own single-node job.
  bool gang = true;
  std::uint32_t nodes = 1;
};

struct AppOutcome {
  std::string name;
  double completion_seconds = 0.0;
  double isolated_seconds = 0.0;  // same policy, app alone on the cluster
};

struct UtilizationReport {
  SchedulerKind scheduler = SchedulerKind::centralized;
  double makespan_seconds = 0.0;
  double busy_slot_seconds = 0.0;
  double capacity_slot_seconds = 0.0;
  double utilization = 0.0;
  // Jain's index over isolated/completion per app; 1 is perfectly even.
  double fairness = 0.0;
  std::uint32_t peak_busy_slots = 0;
  std::uint64_t submissions = 0;
  std::vector<AppOutcome> apps;
};

// One 4-node gang job of 60 one-second tasks plus 64 independent one-second
// tasks.
std::vector<SimApp> mixed_workload();

// Centralized or multilevel only.
UtilizationReport simulate(const fabric::ClusterTopology& topology,
                           const std::vector<SimApp>& workload, SchedulerKind scheduler);

double jain_index(const std::vector<double>& values);

}  // namespace ogre::sched
