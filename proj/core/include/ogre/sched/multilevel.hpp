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

// Multi-level resource management: applications register an application
// master, ask for containers, and schedule their own tasks inside whatever
// the resource manager grants. Grants arrive incrementally as capacity frees.
//
// ResourceManagerCore is the single-threaded allocation logic;
// ResourceManager runs it behind a serialized event loop and delivers
// callbacks asynchronously.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ogre/fabric/cluster.hpp"
#include "ogre/fabric/metrics.hpp"

namespace ogre::sched {

using fabric::NodeId;
using SessionId = std::uint64_t;
using ContainerId = std::uint64_t;

enum class ContainerState { granted, running, released, revoked };

struct Container {
  ContainerId id = 0;
  SessionId session = 0;
  NodeId node = 0;
  std::uint32_t cores = 1;
  std::uint64_t memory = 0;
  ContainerState state = ContainerState::granted;
  std::uint64_t request_id = 0;
  bool had_preference = false;
  bool locality_hit = false;
};

struct ResourceRequest {
  std::uint32_t count = 1;
  std::uint32_t cores = 1;
  std::uint64_t memory = 0;  // 0: memory_per_node / cores_per_node per core
  std::vector<NodeId> preferred;
};

struct RmEvent {
  enum class Kind { granted, revoked };
  Kind kind = Kind::granted;
  Container container;
};

struct LocalityStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t unconstrained = 0;
};

class ResourceManagerCore {
 public:
  // A request with preferences waits this many scheduling rounds for a
  // preferred node before it may be placed anywhere.
  static constexpr std::uint32_t kDefaultLocalityWait = 3;

  explicit ResourceManagerCore(fabric::ClusterTopology topology,
                               std::uint32_t locality_wait_rounds = kDefaultLocalityWait);

  SessionId register_app(const std::string& app_id);
  // Releases every container the session holds and drops its requests.
  std::vector<RmEvent> deregister(SessionId session);

  std::uint64_t request(SessionId session, ResourceRequest request);
  // One allocation round over pending requests, FIFO by arrival.
  std::vector<RmEvent> schedule();

  void mark_running(SessionId session, ContainerId container);
  // Acknowledgement or task completion: capacity returns to the pool and a
  // round runs.
  std::vector<RmEvent> release(SessionId session, ContainerId container);
  // Emits revocations. Capacity comes back on the matching release.
  std::vector<RmEvent> revoke(SessionId session, std::span<const ContainerId> containers);

  std::vector<Container> live_containers(SessionId session) const;
  std::uint32_t free_cores(NodeId node) const;
  std::uint64_t free_memory(NodeId node) const;
  std::uint64_t pending_containers() const;
  std::uint64_t pending_containers(SessionId session) const;
  LocalityStats locality() const noexcept { return locality_; }
  const fabric::ClusterTopology& topology() const noexcept { return topology_; }

 private:
  struct Session {
    std::string app_id;
    bool active = true;
  };
  struct Pending {
    std::uint64_t id;
    SessionId session;
    ResourceRequest request;
    std::uint32_t remaining;
    std::uint32_t rounds_waited = 0;
  };

  Session& session(SessionId id);
  const Session& session(SessionId id) const;
  Container& owned(SessionId session, ContainerId container);
  bool fits(NodeId node, const Pending& p) const;
  std::optional<NodeId> pick(const Pending& p, bool preferred_only) const;
  std::vector<RmEvent> free_container(Container& c);

  fabric::ClusterTopology topology_;
  std::uint32_t locality_wait_;
  std::uint64_t default_memory_per_core_;
  std::vector<std::uint32_t> free_cores_;
  std::vector<std::uint64_t> free_memory_;
  std::map<SessionId, Session> sessions_;
  std::deque<Pending> pending_;
  std::map<ContainerId, Container> containers_;
  SessionId next_session_ = 0;
  ContainerId next_container_ = 0;
  std::uint64_t next_request_ = 0;
  LocalityStats locality_;
};

struct AppMasterCallbacks {
  std::function<void(const Container&)> on_granted;
  std::function<void(const Container&)> on_revoked;
};

class ResourceManager {
 public:
  struct Options {
    std::uint32_t locality_wait_rounds = ResourceManagerCore::kDefaultLocalityWait;
    std::chrono::microseconds heartbeat{1000};
  };

  ResourceManager(fabric::ClusterTopology topology, fabric::Metrics* metrics);
  ResourceManager(fabric::ClusterTopology topology, fabric::Metrics* metrics, Options options);
  ~ResourceManager();
  ResourceManager(const ResourceManager&) = delete;
  ResourceManager& operator=(const ResourceManager&) = delete;

  // Callbacks run on the event-loop thread, in order per session. They may
  // call back into the manager.
  SessionId register_app_master(const std::string& app_id, AppMasterCallbacks callbacks);
  void deregister(SessionId session);
  void request_containers(SessionId session, ResourceRequest request);
  void mark_running(SessionId session, ContainerId container);
  void release(SessionId session, ContainerId container);
  void revoke_containers(SessionId session, std::vector<ContainerId> containers);

  std::vector<Container> live_containers(SessionId session) const;
  LocalityStats locality() const;
  const fabric::ClusterTopology& topology() const noexcept { return topology_; }

 private:
  template <class F>
  auto call(F&& fn) -> decltype(fn());
  void loop();
  void deliver(std::vector<RmEvent> events);

  fabric::ClusterTopology topology_;
  fabric::Metrics* metrics_;
  Options options_;
  ResourceManagerCore core_;
  std::map<SessionId, AppMasterCallbacks> callbacks_;
  std::deque<RmEvent> outbox_;
  bool delivering_ = false;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> commands_;
  bool stopping_ = false;
  std::thread::id loop_id_;
  std::thread thread_;
};

}  // namespace ogre::sched
