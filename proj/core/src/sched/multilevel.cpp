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

#include "ogre/sched/multilevel.hpp"

#include <algorithm>
#include <future>

#include "ogre/error.hpp"

namespace ogre::sched {

ResourceManagerCore::ResourceManagerCore(fabric::ClusterTopology topology,
                                         std::uint32_t locality_wait_rounds)
    : topology_(topology), locality_wait_(locality_wait_rounds) {
  topology_.validate();
  default_memory_per_core_ = topology_.memory_per_node / topology_.cores_per_node;
  free_cores_.assign(topology_.node_count, topology_.cores_per_node);
  free_memory_.assign(topology_.node_count, topology_.memory_per_node);
}

ResourceManagerCore::Session& ResourceManagerCore::session(SessionId id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end() || !it->second.active) {
    fail(ErrorKind::scheduler, "no registered application master for session " +
                                   std::to_string(id));
  }
  return it->second;
}

const ResourceManagerCore::Session& ResourceManagerCore::session(SessionId id) const {
  return const_cast<ResourceManagerCore*>(this)->session(id);
}

SessionId ResourceManagerCore::register_app(const std::string& app_id) {
  for (const auto& [_, s] : sessions_) {
    if (s.active && s.app_id == app_id) {
      fail(ErrorKind::scheduler, "application master already registered: " + app_id);
    }
  }
  const auto id = ++next_session_;
  sessions_[id] = Session{app_id, true};
  return id;
}

std::vector<RmEvent> ResourceManagerCore::deregister(SessionId id) {
  session(id);
  std::erase_if(pending_, [&](const Pending& p) { return p.session == id; });
  for (auto& [_, c] : containers_) {
    if (c.session == id && (c.state == ContainerState::granted ||
                            c.state == ContainerState::running ||
                            c.state == ContainerState::revoked)) {
      free_container(c);
    }
  }
  sessions_[id].active = false;
  return schedule();
}

std::uint64_t ResourceManagerCore::request(SessionId id, ResourceRequest request) {
  session(id);
  if (request.count == 0) fail(ErrorKind::scheduler, "container count must be positive");
  if (request.cores == 0) fail(ErrorKind::scheduler, "container cores must be positive");
  if (request.memory == 0) request.memory = default_memory_per_core_ * request.cores;
  if (request.cores > topology_.cores_per_node ||
      request.memory > topology_.memory_per_node) {
    fail(ErrorKind::scheduler, "container shape exceeds node capacity");
  }
  for (auto n : request.preferred) {
    if (n >= topology_.node_count) {
      fail(ErrorKind::scheduler, "preferred node " + std::to_string(n) + " does not exist");
    }
  }
  const auto rid = ++next_request_;
  const auto count = request.count;
  pending_.push_back(Pending{rid, id, std::move(request), count, 0});
  return rid;
}

bool ResourceManagerCore::fits(NodeId node, const Pending& p) const {
  return free_cores_[node] >= p.request.cores && free_memory_[node] >= p.request.memory;
}

std::optional<NodeId> ResourceManagerCore::pick(const Pending& p, bool preferred_only) const {
  auto best_of = [&](auto&& candidates) -> std::optional<NodeId> {
    std::optional<NodeId> best;
    for (NodeId n : candidates) {
      if (!fits(n, p)) continue;
      if (!best || free_cores_[n] > free_cores_[*best] ||
          (free_cores_[n] == free_cores_[*best] && n < *best)) {
        best = n;
      }
    }
    return best;
  };
  if (auto local = best_of(p.request.preferred)) return local;
  if (preferred_only) return std::nullopt;
  std::vector<NodeId> all(topology_.node_count);
  for (NodeId n = 0; n < all.size(); ++n) all[n] = n;
  return best_of(all);
}

std::vector<RmEvent> ResourceManagerCore::schedule() {
  std::vector<RmEvent> events;
  for (auto& p : pending_) {
    const bool constrained = !p.request.preferred.empty();
    while (p.remaining > 0) {
      const bool wait_for_locality = constrained && p.rounds_waited < locality_wait_;
      auto node = pick(p, wait_for_locality);
      if (!node) break;
      Container c;
      c.id = ++next_container_;
      c.session = p.session;
      c.node = *node;
      c.cores = p.request.cores;
      c.memory = p.request.memory;
      c.request_id = p.id;
      c.had_preference = constrained;
      c.locality_hit = constrained && std::find(p.request.preferred.begin(),
                                                p.request.preferred.end(),
                                                *node) != p.request.preferred.end();
      if (!constrained) {
        ++locality_.unconstrained;
      } else if (c.locality_hit) {
        ++locality_.hits;
      } else {
        ++locality_.misses;
      }
      free_cores_[*node] -= c.cores;
      free_memory_[*node] -= c.memory;
      containers_[c.id] = c;
      events.push_back(RmEvent{RmEvent::Kind::granted, c});
      --p.remaining;
    }
    // Only a missed opportunity (capacity elsewhere) counts against the wait.
    if (p.remaining > 0 && constrained && pick(p, false)) ++p.rounds_waited;
  }
  std::erase_if(pending_, [](const Pending& p) { return p.remaining == 0; });
  return events;
}

Container& ResourceManagerCore::owned(SessionId id, ContainerId container) {
  session(id);
  auto it = containers_.find(container);
  if (it == containers_.end() || it->second.session != id) {
    fail(ErrorKind::not_found, "unknown container " + std::to_string(container));
  }
  return it->second;
}

void ResourceManagerCore::mark_running(SessionId id, ContainerId container) {
  auto& c = owned(id, container);
  if (c.state != ContainerState::granted) {
    fail(ErrorKind::scheduler, "container " + std::to_string(container) + " is not idle");
  }
  c.state = ContainerState::running;
}

std::vector<RmEvent> ResourceManagerCore::free_container(Container& c) {
  free_cores_[c.node] += c.cores;
  free_memory_[c.node] += c.memory;
  c.state = ContainerState::released;
  return {};
}

std::vector<RmEvent> ResourceManagerCore::release(SessionId id, ContainerId container) {
  auto& c = owned(id, container);
  if (c.state == ContainerState::released) {
    fail(ErrorKind::scheduler, "container " + std::to_string(container) + " already released");
  }
  free_container(c);
  return schedule();
}

std::vector<RmEvent> ResourceManagerCore::revoke(SessionId id,
                                                 std::span<const ContainerId> containers) {
  for (auto cid : containers) {
    auto& c = owned(id, cid);
    if (c.state == ContainerState::released) {
      fail(ErrorKind::not_found, "container " + std::to_string(cid) + " is not live");
    }
  }
  std::vector<RmEvent> events;
  for (auto cid : containers) {
    auto& c = containers_.at(cid);
    if (c.state == ContainerState::revoked) continue;
    c.state = ContainerState::revoked;
    events.push_back(RmEvent{RmEvent::Kind::revoked, c});
  }
  return events;
}

std::vector<Container> ResourceManagerCore::live_containers(SessionId id) const {
  session(id);
  std::vector<Container> out;
  for (const auto& [_, c] : containers_) {
    if (c.session == id &&
        (c.state == ContainerState::granted || c.state == ContainerState::running)) {
      out.push_back(c);
    }
  }
  return out;
}

std::uint32_t ResourceManagerCore::free_cores(NodeId node) const {
  return free_cores_.at(node);
}

std::uint64_t ResourceManagerCore::free_memory(NodeId node) const {
  return free_memory_.at(node);
}

std::uint64_t ResourceManagerCore::pending_containers() const {
  std::uint64_t n = 0;
  for (const auto& p : pending_) n += p.remaining;
  return n;
}

std::uint64_t ResourceManagerCore::pending_containers(SessionId id) const {
  std::uint64_t n = 0;
  for (const auto& p : pending_) {
    if (p.session == id) n += p.remaining;
  }
  return n;
}

// --- service ---------------------------------------------------------------

ResourceManager::ResourceManager(fabric::ClusterTopology topology, fabric::Metrics* metrics)
    : ResourceManager(topology, metrics, Options{}) {}

ResourceManager::ResourceManager(fabric::ClusterTopology topology, fabric::Metrics* metrics,
                                 Options options)
    : topology_(topology),
      metrics_(metrics),
      options_(options),
      core_(topology, options.locality_wait_rounds) {
  thread_ = std::thread([this] { loop(); });
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return loop_id_ != std::thread::id{}; });
}

ResourceManager::~ResourceManager() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

template <class F>
auto ResourceManager::call(F&& fn) -> decltype(fn()) {
  using R = decltype(fn());
  if (std::this_thread::get_id() == loop_id_) return fn();
  std::packaged_task<R()> task(std::forward<F>(fn));
  auto result = task.get_future();
  {
    std::lock_guard lock(mu_);
    if (stopping_) fail(ErrorKind::scheduler, "resource manager stopped");
    commands_.emplace_back([&task] { task(); });
  }
  cv_.notify_all();
  return result.get();
}

void ResourceManager::loop() {
  {
    std::lock_guard lock(mu_);
    loop_id_ = std::this_thread::get_id();
  }
  cv_.notify_all();
  for (;;) {
    std::function<void()> command;
    {
      std::unique_lock lock(mu_);
      const bool woke = cv_.wait_for(lock, options_.heartbeat,
                                     [&] { return stopping_ || !commands_.empty(); });
      if (stopping_ && commands_.empty()) return;
      if (woke) {
        command = std::move(commands_.front());
        commands_.pop_front();
      }
    }
    if (command) {
      command();
    } else if (core_.pending_containers() > 0) {
      deliver(core_.schedule());
    }
  }
}

void ResourceManager::deliver(std::vector<RmEvent> events) {
  outbox_.insert(outbox_.end(), events.begin(), events.end());
  if (delivering_) return;  // a callback re-entered; the outer drain continues
  delivering_ = true;
  while (!outbox_.empty()) {
    RmEvent e = std::move(outbox_.front());
    outbox_.pop_front();
    auto it = callbacks_.find(e.container.session);
    if (e.kind == RmEvent::Kind::granted && metrics_) {
      metrics_->add(fabric::Counter::container_grants);
    }
    if (it == callbacks_.end()) continue;
    const auto& cb = e.kind == RmEvent::Kind::granted ? it->second.on_granted
                                                       : it->second.on_revoked;
    if (!cb) continue;
    try {
      cb(e.container);
    } catch (...) {
      // A failing application master must not take the manager down.
    }
  }
  delivering_ = false;
}

SessionId ResourceManager::register_app_master(const std::string& app_id,
                                               AppMasterCallbacks callbacks) {
  return call([&] {
    const auto id = core_.register_app(app_id);
    callbacks_[id] = std::move(callbacks);
    if (metrics_) metrics_->add(fabric::Counter::jobs_launched);
    return id;
  });
}

void ResourceManager::deregister(SessionId session) {
  call([&] {
    auto events = core_.deregister(session);
    callbacks_.erase(session);
    deliver(std::move(events));
  });
}

void ResourceManager::request_containers(SessionId session, ResourceRequest request) {
  call([&] {
    core_.request(session, std::move(request));
    deliver(core_.schedule());
  });
}

void ResourceManager::mark_running(SessionId session, ContainerId container) {
  call([&] { core_.mark_running(session, container); });
}

void ResourceManager::release(SessionId session, ContainerId container) {
  call([&] { deliver(core_.release(session, container)); });
}

void ResourceManager::revoke_containers(SessionId session, std::vector<ContainerId> containers) {
  call([&] { deliver(core_.revoke(session, containers)); });
}

std::vector<Container> ResourceManager::live_containers(SessionId session) const {
  return const_cast<ResourceManager*>(this)->call([&] { return core_.live_containers(session); });
}

LocalityStats ResourceManager::locality() const {
  return const_cast<ResourceManager*>(this)->call([&] { return core_.locality(); });
}

}  // namespace ogre::sched
