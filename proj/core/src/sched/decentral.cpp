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

#include "ogre/sched/decentral.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

#include "ogre/error.hpp"

namespace ogre::sched {

DecentralizedScheduler::DecentralizedScheduler(std::uint32_t node_count, std::uint64_t seed,
                                               std::uint32_t sample_size)
    : node_count_(node_count), sample_size_(sample_size), rng_(seed) {
  if (node_count == 0) fail(ErrorKind::invalid_argument, "scheduler needs >= 1 node");
  if (sample_size == 0) fail(ErrorKind::invalid_argument, "sample size must be >= 1");
}

std::vector<fabric::NodeId> DecentralizedScheduler::sample() {
  std::vector<fabric::NodeId> all(node_count_);
  std::iota(all.begin(), all.end(), 0);
  std::vector<fabric::NodeId> probed;
  std::lock_guard lock(mu_);
  std::sample(all.begin(), all.end(), std::back_inserter(probed),
              std::min(sample_size_, node_count_), rng_);
  return probed;
}

fabric::NodeId DecentralizedScheduler::place(std::span<const std::size_t> queue_lengths) {
  if (queue_lengths.size() != node_count_) {
    fail(ErrorKind::invalid_argument, "queue length vector does not match the cluster");
  }
  const auto probed = sample();
  return pick_shortest(queue_lengths, probed);
}

fabric::NodeId DecentralizedScheduler::pick_shortest(std::span<const std::size_t> queue_lengths,
                                                     std::span<const fabric::NodeId> probed) {
  if (probed.empty()) fail(ErrorKind::invalid_argument, "no nodes probed");
  fabric::NodeId best = probed.front();
  for (auto n : probed) {
    if (queue_lengths[n] < queue_lengths[best] ||
        (queue_lengths[n] == queue_lengths[best] && n < best)) {
      best = n;
    }
  }
  return best;
}

}  // namespace ogre::sched
