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

// Sampling placement: probe a few random nodes, take the shortest queue.

#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <span>
#include <vector>

#include "ogre/fabric/cluster.hpp"

namespace ogre::sched {

class DecentralizedScheduler {
 public:
  static constexpr std::uint32_t kDefaultSample = 2;

  DecentralizedScheduler(std::uint32_t node_count, std::uint64_t seed,
                         std::uint32_t sample_size = kDefaultSample);

  std::uint32_t sample_size() const noexcept { return sample_size_; }

  // `queue_lengths[n]` is node n's current queue depth.
  fabric::NodeId place(std::span<const std::size_t> queue_lengths);

  // min(sample_size, node_count) distinct nodes, uniformly.
  std::vector<fabric::NodeId> sample();

  // Shortest queue among the probed nodes; ties go to the lowest node id.
  static fabric::NodeId pick_shortest(std::span<const std::size_t> queue_lengths,
                                      std::span<const fabric::NodeId> probed);

 private:
  std::uint32_t node_count_;
  std::uint32_t sample_size_;
  std::mutex mu_;
  std::mt19937_64 rng_;
};

}  // namespace ogre::sched
