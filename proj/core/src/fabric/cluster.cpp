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

#include "ogre/fabric/cluster.hpp"

#include <algorithm>

#include "ogre/error.hpp"

namespace ogre::fabric {

std::chrono::nanoseconds LinkProfile::transfer_time(std::size_t bytes) const noexcept {
  const double seconds = latency_us * 1e-6 + static_cast<double>(bytes) / bandwidth_bytes_per_s;
  return std::chrono::nanoseconds(static_cast<std::int64_t>(seconds * 1e9));
}

void ClusterTopology::validate() const {
  if (node_count == 0) fail(ErrorKind::invalid_argument, "node_count must be >= 1");
  if (cores_per_node == 0) fail(ErrorKind::invalid_argument, "cores_per_node must be >= 1");
  if (memory_per_node == 0) fail(ErrorKind::invalid_argument, "memory_per_node must be >= 1");
  if (!(link.latency_us >= 0.0) || !(link.bandwidth_bytes_per_s > 0.0)) {
    fail(ErrorKind::invalid_argument, "link latency must be >= 0 and bandwidth > 0");
  }
}

Cluster::Cluster(ClusterTopology topology) : topology_(topology) {
  topology_.validate();
  nodes_.reserve(topology_.node_count);
  for (NodeId n = 0; n < topology_.node_count; ++n) {
    nodes_.push_back(std::make_unique<Node>());
  }
  try {
    for (NodeId n = 0; n < topology_.node_count; ++n) {
      for (std::uint32_t s = 0; s < topology_.cores_per_node; ++s) {
        nodes_[n]->workers.emplace_back([this, n, s] { worker_loop(n, s); });
      }
    }
  } catch (const std::system_error& e) {
    shutdown();
    fail(ErrorKind::fabric, std::string("cannot spawn node workers: ") + e.what());
  }
}

Cluster::~Cluster() { shutdown(); }

void Cluster::shutdown() {
  if (stopping_.exchange(true)) return;
  for (auto& node : nodes_) {
    {
      std::lock_guard lock(node->mu);
    }
    node->cv.notify_all();
  }
  for (auto& node : nodes_) {
    for (auto& w : node->workers) {
      if (w.joinable()) w.join();
    }
    std::lock_guard lock(node->mu);
    for (auto& p : node->queue) {
      p.done.set_value(TaskResult{p.spec.id, p.spec.target.value_or(0), false,
                                  "cluster shut down", 0.0});
    }
    node->queue.clear();
  }
  abort("cluster shut down");
}

void Cluster::check_node(NodeId node) const {
  if (node >= nodes_.size()) {
    fail(ErrorKind::invalid_argument, "unknown node " + std::to_string(node));
  }
}

std::uint32_t Cluster::busy_slots() const {
  std::uint32_t busy = 0;
  for (const auto& node : nodes_) {
    std::lock_guard lock(node->mu);
    busy += node->running;
  }
  return busy;
}

std::size_t Cluster::queue_length(NodeId node) const {
  check_node(node);
  std::lock_guard lock(nodes_[node]->mu);
  return nodes_[node]->queue.size() + nodes_[node]->running;
}

std::vector<std::size_t> Cluster::queue_lengths() const {
  std::vector<std::size_t> out;
  for (NodeId n = 0; n < nodes_.size(); ++n) out.push_back(queue_length(n));
  return out;
}

std::future<TaskResult> Cluster::run_task(TaskSpec spec, TaskBody body) {
  if (stopping_) fail(ErrorKind::fabric, "cluster is shut down");
  if (spec.id == 0) spec.id = next_task_id();
  {
    std::lock_guard lock(ids_mu_);
    if (!task_ids_.insert(spec.id).second) {
      fail(ErrorKind::invalid_argument, "duplicate task id " + std::to_string(spec.id));
    }
  }
  if (!spec.target) {
    auto lengths = queue_lengths();
    spec.target = static_cast<NodeId>(
        std::min_element(lengths.begin(), lengths.end()) - lengths.begin());
  }
  check_node(*spec.target);

  Node& node = *nodes_[*spec.target];
  std::future<TaskResult> fut;
  {
    std::lock_guard lock(node.mu);
    if (node.down) fail(ErrorKind::fabric, "node " + std::to_string(*spec.target) + " is down");
    Pending p{std::move(spec), std::move(body), {}};
    fut = p.done.get_future();
    node.queue.push_back(std::move(p));
  }
  node.cv.notify_one();
  return fut;
}

void Cluster::worker_loop(NodeId n, std::uint32_t slot) {
  Node& node = *nodes_[n];
  for (;;) {
    Pending task;
    {
      std::unique_lock lock(node.mu);
      node.cv.wait(lock, [&] { return stopping_ || !node.queue.empty(); });
      if (stopping_) return;
      task = std::move(node.queue.front());
      node.queue.pop_front();
      ++node.running;
    }
    metrics_.add(Counter::tasks_launched);
    TaskResult result{task.spec.id, n, true, {}, 0.0};
    const auto start = std::chrono::steady_clock::now();
    try {
      TaskContext ctx(*this, n, slot, task.spec.id);
      task.body(ctx);
    } catch (const std::exception& e) {
      result.ok = false;
      result.error = e.what();
    } catch (...) {
      result.ok = false;
      result.error = "unknown task failure";
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    {
      std::lock_guard lock(node.mu);
      --node.running;
    }
    task.done.set_value(std::move(result));
  }
}

Cluster::Mailbox& Cluster::mailbox(Endpoint at) {
  std::lock_guard lock(boxes_mu_);
  auto& box = boxes_[at];
  if (!box) box = std::make_unique<Mailbox>();
  return *box;
}

void Cluster::set_node_down(NodeId node, bool down) {
  check_node(node);
  std::lock_guard lock(nodes_[node]->mu);
  nodes_[node]->down = down;
}

bool Cluster::node_down(NodeId node) const {
  check_node(node);
  std::lock_guard lock(nodes_[node]->mu);
  return nodes_[node]->down;
}

void Cluster::send(Endpoint from, Endpoint to, std::uint64_t tag, Channel channel,
                   Bytes payload) {
  check_node(from.node);
  check_node(to.node);
  if (node_down(to.node)) {
    fail(ErrorKind::fabric, "delivery failed: node " + std::to_string(to.node) + " is down");
  }
  const std::uint64_t wire = kFrameHeaderBytes + payload.size();
  if (from.node == to.node) {
    metrics_.add(Counter::intra_node_messages);
    metrics_.add(Counter::intra_node_bytes, wire);
  } else {
    metrics_.add(Counter::network_messages);
    metrics_.add(Counter::network_bytes, wire);
    if (topology_.link.inject_delay) {
      std::this_thread::sleep_for(topology_.link.transfer_time(wire));
    }
  }
  if (channel == Channel::collective) {
    metrics_.add(Counter::collective_messages);
    metrics_.add(Counter::collective_bytes, wire);
  }

  Mailbox& box = mailbox(to);
  {
    std::lock_guard lock(box.mu);
    box.messages.push_back(Message{from, to, tag, channel, std::move(payload)});
  }
  box.cv.notify_all();
}

namespace {

template <class Deque>
auto find_match(Deque& messages, const std::optional<Endpoint>& from, std::uint64_t tag) {
  return std::find_if(messages.begin(), messages.end(), [&](const Message& m) {
    return m.tag == tag && (!from || m.from == *from);
  });
}

}  // namespace

Message Cluster::recv(Endpoint at, std::optional<Endpoint> from, std::uint64_t tag) {
  check_node(at.node);
  Mailbox& box = mailbox(at);
  std::unique_lock lock(box.mu);
  for (;;) {
    auto it = find_match(box.messages, from, tag);
    if (it != box.messages.end()) {
      Message m = std::move(*it);
      box.messages.erase(it);
      return m;
    }
    if (aborted_) {
      std::lock_guard reason_lock(boxes_mu_);
      fail(ErrorKind::fabric, "receive aborted: " + abort_reason_);
    }
    box.cv.wait(lock);
  }
}

std::optional<Message> Cluster::try_recv(Endpoint at, std::optional<Endpoint> from,
                                         std::uint64_t tag) {
  check_node(at.node);
  Mailbox& box = mailbox(at);
  std::lock_guard lock(box.mu);
  auto it = find_match(box.messages, from, tag);
  if (it == box.messages.end()) return std::nullopt;
  Message m = std::move(*it);
  box.messages.erase(it);
  return m;
}

void Cluster::abort(const std::string& reason) {
  std::vector<Mailbox*> boxes;
  {
    std::lock_guard lock(boxes_mu_);
    if (!aborted_) abort_reason_ = reason;
    aborted_ = true;
    for (auto& [_, box] : boxes_) boxes.push_back(box.get());
  }
  for (auto* box : boxes) {
    {
      std::lock_guard lock(box->mu);
    }
    box->cv.notify_all();
  }
}

}  // namespace ogre::fabric
