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

#include "ogre/sched/pilot.hpp"

#include <algorithm>
#include <thread>

#include "ogre/blocking_queue.hpp"
#include "ogre/error.hpp"

namespace ogre::sched {

Pilot::Pilot(fabric::Cluster& cluster, std::vector<fabric::NodeId> slot_nodes,
             std::function<void()> release, PilotOptions options)
    : cluster_(cluster),
      slot_nodes_(std::move(slot_nodes)),
      release_(std::move(release)),
      options_(std::move(options)) {
  for (std::size_t s = 0; s < slot_nodes_.size(); ++s) free_slots_.insert(s);
}

std::unique_ptr<Pilot> Pilot::acquire(fabric::Cluster& cluster,
                                      CentralizedScheduler& scheduler, std::uint32_t nodes,
                                      PilotOptions options) {
  auto alloc = scheduler.submit(JobRequest{options.app_id, nodes, {}, true});
  std::vector<fabric::NodeId> slots;
  for (auto n : alloc.nodes) {
    for (std::uint32_t c = 0; c < cluster.topology().cores_per_node; ++c) slots.push_back(n);
  }
  auto release = [&scheduler, id = alloc.job_id] { scheduler.release(id); };
  return std::unique_ptr<Pilot>(new Pilot(cluster, std::move(slots), release, std::move(options)));
}

std::unique_ptr<Pilot> Pilot::acquire(fabric::Cluster& cluster, ResourceManager& rm,
                                      std::uint32_t nodes, PilotOptions options) {
  if (nodes == 0 || nodes > rm.topology().node_count) {
    fail(ErrorKind::scheduler, "pilot shape is not satisfiable");
  }
  auto grants = std::make_shared<BlockingQueue<Container>>();
  const auto session = rm.register_app_master(
      options.app_id, AppMasterCallbacks{[grants](const Container& c) { grants->push(c); }, {}});
  const std::uint32_t wanted = nodes * rm.topology().cores_per_node;
  rm.request_containers(session, ResourceRequest{wanted, 1, 0, {}});
  std::vector<fabric::NodeId> slots;
  while (slots.size() < wanted) {
    auto c = grants->pop();
    rm.mark_running(session, c.id);
    slots.push_back(c.node);
  }
  std::sort(slots.begin(), slots.end());
  auto release = [&rm, session] { rm.deregister(session); };
  return std::unique_ptr<Pilot>(new Pilot(cluster, std::move(slots), release, std::move(options)));
}

Pilot::~Pilot() {
  try {
    shutdown();
  } catch (...) {
  }
}

std::future<fabric::TaskResult> Pilot::submit_cu(fabric::TaskSpec spec, fabric::TaskBody body,
                                                 std::uint32_t cores) {
  if (cores != 1) fail(ErrorKind::scheduler, "compute unit larger than a pilot slot");
  auto done = std::make_shared<std::promise<fabric::TaskResult>>();
  auto fut = done->get_future();
  std::lock_guard lock(mu_);
  if (closed_) fail(ErrorKind::scheduler, "pilot is shut down");
  spec.kind = fabric::TaskKind::compute_unit;
  if (spec.id == 0) spec.id = cluster_.next_task_id();
  queue_.push_back(Queued{std::move(spec), std::move(body), std::move(done)});
  dispatch_locked();
  return fut;
}

void Pilot::dispatch_locked() {
  while (!queue_.empty() && !free_slots_.empty()) {
    Queued cu = std::move(queue_.front());
    queue_.pop_front();
    const std::size_t slot = *free_slots_.begin();
    free_slots_.erase(free_slots_.begin());
    ++running_;
    start_order_.push_back(cu.spec.id);
    cu.spec.target = slot_nodes_[slot];

    auto wrapper = [this, slot, body = std::move(cu.body), done = cu.done,
                    launch = options_.cu_launch](fabric::TaskContext& ctx) {
      fabric::TaskResult r{ctx.task_id(), ctx.node(), true, {}, 0.0};
      const auto start = std::chrono::steady_clock::now();
      if (launch.count() > 0) std::this_thread::sleep_for(launch);
      try {
        body(ctx);
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      } catch (...) {
        r.ok = false;
        r.error = "unknown compute unit failure";
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      finished(slot);
      done->set_value(std::move(r));
    };
    try {
      cluster_.run_task(cu.spec, std::move(wrapper));
    } catch (const std::exception& e) {
      --running_;
      free_slots_.insert(slot);
      cu.done->set_value(fabric::TaskResult{cu.spec.id, slot_nodes_[slot], false, e.what(), 0.0});
    }
  }
  if (running_ == 0 && queue_.empty()) idle_cv_.notify_all();
}

void Pilot::finished(std::size_t slot) {
  std::lock_guard lock(mu_);
  --running_;
  ++completed_;
  free_slots_.insert(slot);
  dispatch_locked();
}

void Pilot::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return running_ == 0 && queue_.empty(); });
}

void Pilot::shutdown() {
  {
    std::unique_lock lock(mu_);
    if (closed_) return;
    idle_cv_.wait(lock, [&] { return running_ == 0 && queue_.empty(); });
    closed_ = true;
  }
  if (release_) release_();
}

std::uint64_t Pilot::completed() const {
  std::lock_guard lock(mu_);
  return completed_;
}

std::vector<std::uint64_t> Pilot::start_order() const {
  std::lock_guard lock(mu_);
  return start_order_;
}

}  // namespace ogre::sched
