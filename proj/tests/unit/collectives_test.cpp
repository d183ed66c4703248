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

#include <functional>
#include <random>
#include <thread>

#include "ogre/collectives/collectives.hpp"
#include "ogre/error.hpp"
#include "ogre/fabric/cluster.hpp"

namespace ogre::collectives {
namespace {

using fabric::Counter;
using kernel::PartialSums;

struct GroupRun {
  std::vector<PartialSums> results;
  fabric::MetricsRecord metrics;
};

// One thread per member; member r lives on node r % nodes.
template <class Body>
GroupRun run_group(std::size_t p, Options options, Body body, std::uint32_t nodes = 0) {
  fabric::ClusterTopology t;
  t.node_count = nodes == 0 ? static_cast<std::uint32_t>(p) : nodes;
  t.cores_per_node = 1;
  fabric::Cluster cluster(t);
  CollectiveGroup group;
  for (std::size_t r = 0; r < p; ++r) {
    group.members.push_back({static_cast<fabric::NodeId>(r % t.node_count),
                             static_cast<std::uint32_t>(100 + r)});
  }
  GroupRun out;
  out.results.resize(p);
  std::vector<std::exception_ptr> errors(p);
  {
    std::vector<std::jthread> threads;
    for (std::size_t r = 0; r < p; ++r) {
      threads.emplace_back([&, r] {
        try {
          Communicator comm(cluster, group, r, options);
          out.results[r] = body(comm);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  out.metrics = cluster.snapshot_metrics();
  return out;
}

PartialSums random_sums(std::mt19937_64& rng, std::size_t k, std::size_t d) {
  std::uniform_real_distribution<double> u(-100, 100);
  auto p = PartialSums::zero(k, d);
  for (auto& v : p.sums) v = u(rng);
  for (auto& c : p.counts) c = rng() % 50;
  return p;
}

TEST(MessageCounts, ClosedForms) {
  EXPECT_EQ(tree_allreduce_messages(1), 0u);
  EXPECT_EQ(tree_allreduce_messages(8), 14u);
  EXPECT_EQ(recursive_doubling_messages(4), 8u);
  EXPECT_EQ(recursive_doubling_messages(8), 24u);
  // Non-power-of-two: 4 * 2 rounds plus one pre and one post message per extra member.
  EXPECT_EQ(recursive_doubling_messages(6), 12u);
}

TEST(Allreduce, FourEqualContributions) {
  for (auto algo : {Algorithm::tree, Algorithm::recursive_doubling}) {
    const auto run = run_group(4, {algo, true, false}, [](Communicator& c) {
      return c.allreduce(PartialSums{1, 2, {1, 2}, {1}});
    });
    for (const auto& r : run.results) {
      EXPECT_EQ(r.sums, (std::vector<double>{4, 8}));
      EXPECT_EQ(r.counts, (std::vector<std::uint64_t>{4}));
    }
  }
}

TEST(Allreduce, SingleMemberIsIdentity) {
  const PartialSums local{1, 1, {3.5}, {2}};
  const auto run = run_group(1, {}, [&](Communicator& c) { return c.allreduce(local); });
  EXPECT_EQ(run.results[0], local);
  EXPECT_EQ(run.metrics[Counter::collective_messages], 0u);
}

class AllreduceCounts : public ::testing::TestWithParam<std::size_t> {};

TEST_P(AllreduceCounts, TreeAndRecursiveDoublingMatchClosedForms) {
  const std::size_t p = GetParam();
  const auto tree = run_group(p, {Algorithm::tree, true, false}, [](Communicator& c) {
    return c.allreduce(PartialSums{1, 1, {double(c.rank())}, {1}});
  });
  EXPECT_EQ(tree.metrics[Counter::collective_messages], 2 * (p - 1));
  const auto rd = run_group(p, {Algorithm::recursive_doubling, true, false}, [](Communicator& c) {
    return c.allreduce(PartialSums{1, 1, {double(c.rank())}, {1}});
  });
  if (std::has_single_bit(p)) {
    EXPECT_EQ(rd.metrics[Counter::collective_messages], p * std::countr_zero(p));
  } else {
    EXPECT_EQ(rd.metrics[Counter::collective_messages], recursive_doubling_messages(p));
  }
  EXPECT_EQ(tree.results, rd.results);
}

INSTANTIATE_TEST_SUITE_P(GroupSizes, AllreduceCounts, ::testing::Values(2, 3, 4, 5, 6, 7, 8));

TEST(Allreduce, DeterministicModeIsBitIdenticalAcrossAlgorithmsAndRoots) {
  std::mt19937_64 rng(17);
  std::vector<PartialSums> inputs;
  for (int r = 0; r < 8; ++r) inputs.push_back(random_sums(rng, 5, 3));
  PartialSums sequential = inputs[0];
  for (std::size_t r = 1; r < inputs.size(); ++r) kernel::merge_into(sequential, inputs[r]);
  for (auto algo : {Algorithm::tree, Algorithm::recursive_doubling}) {
    for (std::size_t root : {0u, 3u, 7u}) {
      const auto run = run_group(8, {algo, true, false}, [&](Communicator& c) {
        return c.allreduce(inputs[c.rank()], root);
      });
      for (const auto& r : run.results) EXPECT_EQ(r, sequential);
    }
  }
}

TEST(Allreduce, ArrivalOrderModeStaysWithinTolerance) {
  std::mt19937_64 rng(23);
  std::vector<PartialSums> inputs;
  for (int r = 0; r < 8; ++r) inputs.push_back(random_sums(rng, 7, 3));
  PartialSums sequential = inputs[0];
  for (std::size_t r = 1; r < inputs.size(); ++r) kernel::merge_into(sequential, inputs[r]);
  for (auto algo : {Algorithm::tree, Algorithm::recursive_doubling}) {
    const auto run = run_group(8, {algo, false, false}, [&](Communicator& c) {
      return c.allreduce(inputs[c.rank()]);
    });
    for (const auto& r : run.results) {
      EXPECT_EQ(r.counts, sequential.counts);
      for (std::size_t i = 0; i < r.sums.size(); ++i) {
        EXPECT_LE(kernel::relative_error(r.sums[i], sequential.sums[i]), 1e-12);
      }
    }
  }
}

TEST(Allreduce, CompressionShrinksBlobPayloadsWithoutChangingResults) {
  // Sparse partial sums, as produced by blob data where most centroids get no
  // points from a given worker.
  auto make = [](std::size_t rank) {
    auto p = PartialSums::zero(200, 3);
    p.sums[rank * 3] = 1.0 + rank;
    p.counts[rank] = 1;
    return p;
  };
  auto body = [&](Communicator& c) { return c.allreduce(make(c.rank())); };
  const auto plain = run_group(4, {Algorithm::tree, true, false}, body);
  const auto packed = run_group(4, {Algorithm::tree, true, true}, body);
  EXPECT_EQ(plain.results, packed.results);
  EXPECT_LT(packed.metrics[Counter::collective_bytes], plain.metrics[Counter::collective_bytes]);
  EXPECT_EQ(packed.metrics[Counter::collective_messages], plain.metrics[Counter::collective_messages]);
}

TEST(Broadcast, TreeMessagesAndExactPayload) {
  const Bytes payload{std::byte{1}, std::byte{2}, std::byte{254}};
  for (std::size_t p : {1u, 5u}) {
    std::vector<Bytes> got(p);
    const auto run = run_group(p, {}, [&](Communicator& c) {
      got[c.rank()] = c.broadcast(2 % p, c.rank() == 2 % p ? payload : Bytes{});
      return PartialSums{};
    });
    EXPECT_EQ(run.metrics[Counter::collective_messages], p - 1);
    for (const auto& g : got) EXPECT_EQ(g, payload);
  }
}

TEST(Reduce, RootOnlyAndMessageCount) {
  std::vector<bool> has(2);
  const auto run = run_group(2, {}, [&](Communicator& c) {
    auto r = c.reduce(1, PartialSums{1, 1, {1.0}, {1}});
    has[c.rank()] = r.has_value();
    return r.value_or(PartialSums{});
  });
  EXPECT_EQ(run.metrics[Counter::collective_messages], 1u);
  EXPECT_FALSE(has[0]);
  EXPECT_TRUE(has[1]);
  EXPECT_EQ(run.results[1].counts, (std::vector<std::uint64_t>{2}));
}

TEST(Reduce, FoldOfIdentitiesIsIdentity) {
  const auto run = run_group(4, {}, [](Communicator& c) {
    return c.reduce(0, PartialSums::zero(3, 2)).value_or(PartialSums::zero(3, 2));
  });
  EXPECT_EQ(run.results[0], PartialSums::zero(3, 2));
}

TEST(Group, Validation) {
  fabric::Cluster cluster(fabric::ClusterTopology{});
  EXPECT_THROW(Communicator(cluster, CollectiveGroup{}, 0), Error);
  EXPECT_THROW(Communicator(cluster, CollectiveGroup{{{0, 1}, {0, 1}}, 0}, 0), Error);
  EXPECT_THROW(Communicator(cluster, CollectiveGroup{{{0, 1}, {1, 1}}, 0}, 2), Error);
}

TEST(Group, AbortSurfacesToMembers) {
  fabric::ClusterTopology t;
  t.node_count = 2;
  fabric::Cluster cluster(t);
  CollectiveGroup group{{{0, 1}, {1, 1}}, 0};
  std::thread killer([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    cluster.abort("member lost");
  });
  Communicator c(cluster, group, 0);
  EXPECT_THROW(c.allreduce(PartialSums::zero(1, 1)), Error);
  killer.join();
}

}  // namespace
}  // namespace ogre::collectives
