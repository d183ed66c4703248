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

// Rigid, job-level gang scheduling: a job receives all of its nodes at once
// or waits. The scheduler never sees the tasks inside a job.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ogre/fabric/cluster.hpp"
#include "ogre/fabric/metrics.hpp"

namespace ogre::sched {

using fabric::NodeId;

struct JobRequest {
  std::string app_id;
  std::uint32_t node_count = 1;
  std::chrono::milliseconds walltime{0};  // 0: unbounded
  bool gang = true;                       // non-gang jobs are single-node
};

struct JobAllocation {
  std::uint64_t job_id = 0;
  std::string app_id;
  std::vector<NodeId> nodes;
};

class CentralizedScheduler {
 public:
  using GrantObserver = std::function<void(const JobRequest&, const JobAllocation&)>;

  explicit CentralizedScheduler(std::uint32_t node_count,
                                fabric::Metrics* metrics = nullptr);

  std::uint32_t node_count() const noexcept { return node_count_; }

  // Queues a job; rejects jobs larger than the cluster.
  std::uint64_t enqueue(JobRequest job);
  // Grants queued jobs in strict FIFO order while the head fits.
  std::vector<JobAllocation> dispatch();
  // Frees a job's nodes and dispatches; returns the newly granted jobs.
  std::vector<JobAllocation> release(std::uint64_t job_id);

  // Enqueue and block until granted.
  JobAllocation submit(JobRequest job);

  std::optional<JobAllocation> allocation(std::uint64_t job_id) const;
  std::uint32_t free_nodes() const;
  std::size_t queued() const;
  std::uint64_t submissions() const;

  // Called under the scheduler lock for every grant.
  void set_grant_observer(GrantObserver observer);

 private:
  std::vector<JobAllocation> dispatch_locked();

  std::uint32_t node_count_;
  fabric::Metrics* metrics_;
  mutable std::mutex mu_;
  std::condition_variable granted_cv_;
  std::vector<bool> busy_;
  std::deque<std::pair<std::uint64_t, JobRequest>> queue_;
  std::map<std::uint64_t, JobAllocation> running_;
  std::uint64_t next_job_ = 0;
  std::uint64_t submissions_ = 0;
  GrantObserver observer_;
};

}  // namespace ogre::sched
