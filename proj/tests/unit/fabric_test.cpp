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

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "ogre/error.hpp"
#include "ogre/fabric/cluster.hpp"
#include "ogre/kernel/wire.hpp"

namespace ogre::fabric {
namespace {

using namespace std::chrono_literals;

ClusterTopology topo(std::uint32_t nodes, std::uint32_t cores) {
  ClusterTopology t;
  t.node_count = nodes;
  t.cores_per_node = cores;
  return t;
}

// Holds every task body until opened.
class Gate {
 public:
  void wait_open() {
    std::unique_lock lock(mu_);
    ++waiting_;
    cv_.notify_all();
    cv_.wait(lock, [&] { return open_; });
  }
  bool wait_for_waiters(int n, std::chrono::milliseconds limit) {
    std::unique_lock lock(mu_);
    return cv_.wait_for(lock, limit, [&] { return waiting_ >= n; });
  }
  int waiting() {
    std::lock_guard lock(mu_);
    return waiting_;
  }
  void open() {
    std::lock_guard lock(mu_);
    open_ = true;
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int waiting_ = 0;
  bool open_ = false;
};

TEST(Topology, SlotsAndValidation) {
  EXPECT_EQ(topo(4, 4).total_slots(), 16u);
  EXPECT_THROW(topo(0, 4).validate(), Error);
  EXPECT_THROW(topo(4, 0).validate(), Error);
  Cluster c(topo(4, 4));
  EXPECT_EQ(c.total_slots(), 16u);
}

TEST(Metrics, FreshClusterIsAllZeroAndSnapshotsAreStable) {
  Cluster c(topo(2, 2));
  const auto a = c.snapshot_metrics();
  EXPECT_EQ(a, MetricsRecord{});
  EXPECT_EQ(c.snapshot_metrics(), a);
}

TEST(Metrics, CounterNamesAreUnique) {
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < kCounterCount; ++i) names.insert(counter_name(static_cast<Counter>(i)));
  EXPECT_EQ(names.size(), kCounterCount);
}

TEST(Tasks, SixteenRunConcurrentlyAndTheSeventeenthQueues) {
  Cluster c(topo(4, 4));
  Gate gate;
  std::vector<std::future<TaskResult>> running;
  for (NodeId n = 0; n < 4; ++n) {
    for (int i = 0; i < 4; ++i) {
      running.push_back(c.run_task({0, TaskKind::other, n, ""}, [&](TaskContext&) { gate.wait_open(); }));
    }
  }
  ASSERT_TRUE(gate.wait_for_waiters(16, 10s));
  EXPECT_EQ(c.busy_slots(), 16u);
  std::atomic<bool> started{false};
  auto extra = c.run_task({0, TaskKind::other, 2, ""}, [&](TaskContext&) { started = true; });
  std::this_thread::sleep_for(50ms);
  EXPECT_FALSE(started.load());
  EXPECT_EQ(c.queue_length(2), 5u);
  gate.open();
  EXPECT_TRUE(extra.get().ok);
  EXPECT_TRUE(started.load());
  for (auto& f : running) EXPECT_TRUE(f.get().ok);
  EXPECT_EQ(c.snapshot_metrics()[Counter::tasks_launched], 17u);
}

TEST(Tasks, FailureIsReportedNotThrown) {
  Cluster c(topo(1, 1));
  auto r = c.run_task({}, [](TaskContext&) { throw std::runtime_error("boom"); }).get();
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.error, "boom");
  EXPECT_EQ(c.snapshot_metrics()[Counter::tasks_launched], 1u);
}

TEST(Tasks, DuplicateIdsAndDownNodesAreRejected) {
  Cluster c(topo(2, 1));
  c.run_task({5, TaskKind::other, 0, ""}, [](TaskContext&) {}).get();
  EXPECT_THROW(c.run_task({5, TaskKind::other, 0, ""}, [](TaskContext&) {}), Error);
  c.set_node_down(1, true);
  EXPECT_THROW(c.run_task({0, TaskKind::other, 1, ""}, [](TaskContext&) {}), Error);
}

TEST(Tasks, ShutdownJoinsWorkers) {
  auto c = std::make_unique<Cluster>(topo(3, 2));
  for (int i = 0; i < 6; ++i) c->run_task({}, [](TaskContext&) {}).get();
  c->shutdown();
  EXPECT_EQ(c->busy_slots(), 0u);
  EXPECT_THROW(c->run_task({}, [](TaskContext&) {}), Error);
}

TEST(Messaging, PartialSumsAccountedBytesAreDeterministic) {
  Cluster c(topo(2, 1));
  const auto payload = kernel::to_bytes(kernel::PartialSums{2, 2, {1, 2, 3, 4}, {1, 1}});
  c.send({0, 1}, {1, 1}, 7, Channel::collective, payload);
  c.send({0, 1}, {1, 1}, 8, Channel::collective, payload);
  const auto m = c.snapshot_metrics();
  // 8-byte frame + u32 k + u32 d + 4 f64 sums + 2 u64 counts
  const std::uint64_t wire = 8 + 4 + 4 + 4 * 8 + 2 * 8;
  EXPECT_EQ(wire, 64u);
  EXPECT_EQ(m[Counter::network_bytes], 2 * wire);
  EXPECT_EQ(m[Counter::collective_bytes], 2 * wire);
  EXPECT_EQ(m[Counter::network_messages], 2u);
}

TEST(Messaging, FifoPerPair) {
  Cluster c(topo(2, 1));
  for (std::uint8_t i = 0; i < 20; ++i) {
    c.send({0, 1}, {1, 1}, 3, Channel::data, Bytes{std::byte{i}});
  }
  for (std::uint8_t i = 0; i < 20; ++i) {
    EXPECT_EQ(c.recv({1, 1}, Endpoint{0, 1}, 3).payload, Bytes{std::byte{i}});
  }
}

TEST(Messaging, SelfSendIsIntraNode) {
  Cluster c(topo(1, 2));
  c.send({0, 1}, {0, 2}, 1, Channel::data, Bytes(10));
  const auto m = c.snapshot_metrics();
  EXPECT_EQ(m[Counter::intra_node_messages], 1u);
  EXPECT_EQ(m[Counter::intra_node_bytes], 18u);
  EXPECT_EQ(m[Counter::network_messages], 0u);
  EXPECT_EQ(c.recv({0, 2}, std::nullopt, 1).payload.size(), 10u);
}

TEST(Messaging, SendToDownNodeFailsAtSender) {
  Cluster c(topo(2, 1));
  c.set_node_down(1, true);
  try {
    c.send({0, 1}, {1, 1}, 1, Channel::data, Bytes(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::fabric);
  }
}

TEST(Messaging, AbortWakesBlockedReceivers) {
  Cluster c(topo(2, 1));
  std::thread t([&] {
    std::this_thread::sleep_for(20ms);
    c.abort("test");
  });
  EXPECT_THROW(c.recv({1, 1}, std::nullopt, 99), Error);
  t.join();
}

TEST(Messaging, InjectedDelayChangesTimeNotResults) {
  ClusterTopology slow = topo(2, 1);
  slow.link.inject_delay = true;
  slow.link.latency_us = 2000;
  Cluster a(topo(2, 1));
  Cluster b(slow);
  const auto start = std::chrono::steady_clock::now();
  for (auto* c : {&a, &b}) c->send({0, 1}, {1, 1}, 1, Channel::data, Bytes(100, std::byte{9}));
  EXPECT_GE(std::chrono::steady_clock::now() - start, 2ms);
  EXPECT_EQ(a.recv({1, 1}, std::nullopt, 1).payload, b.recv({1, 1}, std::nullopt, 1).payload);
  EXPECT_EQ(a.snapshot_metrics().counters, b.snapshot_metrics().counters);
}

}  // namespace
}  // namespace ogre::fabric
