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

#include <benchmark/benchmark.h>

#include <thread>
#include <vector>

#include "ogre/collectives/collectives.hpp"
#include "ogre/fabric/cluster.hpp"

namespace {

using namespace ogre;

// Allreduce of k=500, d=3 partial sums across p ranks, one per node.
void allreduce(benchmark::State& state, collectives::Algorithm algo) {
  const auto p = static_cast<std::size_t>(state.range(0));
  fabric::ClusterTopology t;
  t.node_count = static_cast<std::uint32_t>(p);
  t.cores_per_node = 1;
  fabric::Cluster cluster(t);
  collectives::CollectiveGroup group;
  for (std::size_t r = 0; r < p; ++r) {
    group.members.push_back({static_cast<fabric::NodeId>(r), static_cast<std::uint32_t>(100 + r)});
  }
  auto local = kernel::PartialSums::zero(500, 3);
  for (std::size_t i = 0; i < local.sums.size(); ++i) local.sums[i] = static_cast<double>(i);
  for (auto _ : state) {
    std::vector<std::jthread> ranks;
    for (std::size_t r = 0; r < p; ++r) {
      ranks.emplace_back([&, r] {
        collectives::Communicator comm(cluster, group, r, {algo, true, false});
        benchmark::DoNotOptimize(comm.allreduce(local));
      });
    }
  }
}

void BM_AllreduceTree(benchmark::State& state) { allreduce(state, collectives::Algorithm::tree); }
void BM_AllreduceRecursiveDoubling(benchmark::State& state) {
  allreduce(state, collectives::Algorithm::recursive_doubling);
}
BENCHMARK(BM_AllreduceTree)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_AllreduceRecursiveDoubling)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond)->UseRealTime();

}  // namespace
