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

#include "ogre/sched/centralized.hpp"

#include "ogre/error.hpp"

namespace ogre::sched {

CentralizedScheduler::CentralizedScheduler(std::uint32_t node_count,
                                           fabric::Metrics* metrics)
    : node_count_(node_count), metrics_(metrics), busy_(node_count, false) {
  if (node_count == 0) fail(ErrorKind::invalid_argument, "scheduler needs >= 1 node");
}

std::uint64_t CentralizedScheduler::enqueue(JobRequest job) {
  if (job.node_count == 0) fail(ErrorKind::scheduler, "job requests zero nodes");
  if (job.node_count > node_count_) {
    fail(ErrorKind::scheduler, "job '" + job.app_id + "' needs " +
                                   std::to_string(job.node_count) + " nodes; cluster has " +
                                   std::to_string(node_count_));
  }
  if (!job.gang && job.node_count != 1) {
    fail(ErrorKind::scheduler, "non-gang jobs must request a single node");
  }
  std::lock_guard lock(mu_);
  const auto id = ++next_job_;
  queue_.emplace_back(id, std::move(job));
  ++submissions_;
  if (metrics_) metrics_->add(fabric::Counter::jobs_launched);
  return id;
}

std::vector<JobAllocation> CentralizedScheduler::dispatch_locked() {
  std::vector<JobAllocation> granted;
  while (!queue_.empty()) {
    const auto& [id, job] = queue_.front();
    std::vector<NodeId> free;
    for (NodeId n = 0; n < node_count_ && free.size() < job.node_count; ++n) {
      if (!busy_[n]) free.push_back(n);
    }
    if (free.size() < job.node_count) break;  // head-of-line waits; no partial grant
    for (auto n : free) busy_[n] = true;
    JobAllocation alloc{id, job.app_id, std::move(free)};
    if (observer_) observer_(job, alloc);
    running_[id] = alloc;
    granted.push_back(std::move(alloc));
    queue_.pop_front();
  }
  if (!granted.empty()) granted_cv_.notify_all();
  return granted;
}

std::vector<JobAllocation> CentralizedScheduler::dispatch() {
  std::lock_guard lock(mu_);
  return dispatch_locked();
}

std::vector<JobAllocation> CentralizedScheduler::release(std::uint64_t job_id) {
  std::lock_guard lock(mu_);
  auto it = running_.find(job_id);
  if (it == running_.end()) {
    fail(ErrorKind::not_found, "no running job " + std::to_string(job_id));
  }
  for (auto n : it->second.nodes) busy_[n] = false;
  running_.erase(it);
  return dispatch_locked();
}

JobAllocation CentralizedScheduler::submit(JobRequest job) {
  const auto id = enqueue(std::move(job));
  std::unique_lock lock(mu_);
  dispatch_locked();
  granted_cv_.wait(lock, [&] { return running_.contains(id); });
  return running_.at(id);
}

std::optional<JobAllocation> CentralizedScheduler::allocation(std::uint64_t job_id) const {
  std::lock_guard lock(mu_);
  auto it = running_.find(job_id);
  if (it == running_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t CentralizedScheduler::free_nodes() const {
  std::lock_guard lock(mu_);
  std::uint32_t n = 0;
  for (bool b : busy_) n += b ? 0 : 1;
  return n;
}

std::size_t CentralizedScheduler::queued() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

std::uint64_t CentralizedScheduler::submissions() const {
  std::lock_guard lock(mu_);
  return submissions_;
}

void CentralizedScheduler::set_grant_observer(GrantObserver observer) {
  std::lock_guard lock(mu_);
  observer_ = std::move(observer);
}

}  // namespace ogre::sched
