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

// In-process resource fabric: nodes are groups of worker threads, and every
// byte moving between them goes through `send`, which frames, meters and
// (optionally) delays it.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "ogre/codec.hpp"
#include "ogre/fabric/metrics.hpp"

namespace ogre::fabric {

using NodeId = std::uint32_t;

struct LinkProfile {
  double latency_us = 50.0;
  double bandwidth_bytes_per_s = 1.25e9;  // 10GE
  bool inject_delay = false;

  std::chrono::nanoseconds transfer_time(std::size_t bytes) const noexcept;
};

struct ClusterTopology {
  std::uint32_t node_count = 4;
  std::uint32_t cores_per_node = 4;
  std::uint64_t memory_per_node = 16ull << 30;
  LinkProfile link;

  std::uint32_t total_slots() const noexcept { return node_count * cores_per_node; }
  void validate() const;
};

struct Endpoint {
  NodeId node = 0;
  std::uint32_t port = 0;

  auto operator<=>(const Endpoint&) const = default;
};

enum class Channel : std::uint8_t { control, data, shuffle, collective };

struct Message {
  Endpoint from;
  Endpoint to;
  std::uint64_t tag = 0;
  Channel channel = Channel::control;
  Bytes payload;
};

enum class TaskKind { map, reduce, compute_unit, long_running_worker, other };

struct TaskSpec {
  std::uint64_t id = 0;
  TaskKind kind = TaskKind::other;
  std::optional<NodeId> target;  // least-loaded node when unset
  std::string descriptor;
};

class Cluster;

class TaskContext {
 public:
  TaskContext(Cluster& cluster, NodeId node, std::uint32_t slot, std::uint64_t task_id)
      : cluster_(cluster), node_(node), slot_(slot), task_id_(task_id) {}

  Cluster& cluster() const noexcept { return cluster_; }
  NodeId node() const noexcept { return node_; }
  std::uint32_t slot() const noexcept { return slot_; }
  std::uint64_t task_id() const noexcept { return task_id_; }

 private:
  Cluster& cluster_;
  NodeId node_;
  std::uint32_t slot_;
  std::uint64_t task_id_;
};

using TaskBody = std::function<void(TaskContext&)>;

struct TaskResult {
  std::uint64_t task_id = 0;
  NodeId node = 0;
  bool ok = false;
  std::string error;
  double seconds = 0.0;
};

class Cluster {
 public:
  // Bytes added to every payload on the wire (u64 length prefix).
  static constexpr std::size_t kFrameHeaderBytes = 8;

  explicit Cluster(ClusterTopology topology);
  ~Cluster();
  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  const ClusterTopology& topology() const noexcept { return topology_; }
  std::uint32_t total_slots() const noexcept { return topology_.total_slots(); }
  std::uint32_t busy_slots() const;
  // Queued plus running tasks on a node.
  std::size_t queue_length(NodeId node) const;
  std::vector<std::size_t> queue_lengths() const;

  std::uint64_t next_task_id() noexcept { return next_task_id_.fetch_add(1) + 1; }

  // Runs `body` on a free slot of the target node, queueing FIFO when every
  // slot is busy. A throwing body yields a failed result; it never escapes.
  std::future<TaskResult> run_task(TaskSpec spec, TaskBody body);

  // FIFO per (from, to) pair. Throws ErrorKind::fabric if `to` is down.
  void send(Endpoint from, Endpoint to, std::uint64_t tag, Channel channel,
            Bytes payload);
  // Blocks until a message with `tag` (and `from`, if given) arrives at `at`.
  Message recv(Endpoint at, std::optional<Endpoint> from, std::uint64_t tag);
  std::optional<Message> try_recv(Endpoint at, std::optional<Endpoint> from,
                                  std::uint64_t tag);

  void set_node_down(NodeId node, bool down);
  bool node_down(NodeId node) const;

  // Fails every blocked and future `recv` with ErrorKind::fabric.
  void abort(const std::string& reason);
  bool aborted() const noexcept { return aborted_.load(); }

  // Stops the workers; queued tasks complete with a failed result.
  void shutdown();

  Metrics& metrics() noexcept { return metrics_; }
  MetricsRecord snapshot_metrics() const noexcept { return metrics_.snapshot(); }

 private:
  struct Pending {
    TaskSpec spec;
    TaskBody body;
    std::promise<TaskResult> done;
  };

  struct Node {
    mutable std::mutex mu;
    std::condition_variable cv;
    std::deque<Pending> queue;
    std::uint32_t running = 0;
    bool down = false;
    std::vector<std::thread> workers;
  };

  struct Mailbox {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Message> messages;
  };

  void worker_loop(NodeId node, std::uint32_t slot);
  Mailbox& mailbox(Endpoint at);
  void check_node(NodeId node) const;

  ClusterTopology topology_;
  Metrics metrics_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::atomic<bool> stopping_{false};
  std::atomic<bool> aborted_{false};
  std::string abort_reason_;
  std::atomic<std::uint64_t> next_task_id_{0};

  mutable std::mutex ids_mu_;
  std::set<std::uint64_t> task_ids_;

  mutable std::mutex boxes_mu_;
  std::map<Endpoint, std::unique_ptr<Mailbox>> boxes_;
};

}  // namespace ogre::fabric
