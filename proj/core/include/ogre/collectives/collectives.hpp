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

// Blocking collectives over fabric endpoints: binomial-tree reduce and
// broadcast, and allreduce by tree (reduce + broadcast) or by recursive
// doubling.
//
// Deterministic mode ships the individual contributions instead of partial
// folds, so every algorithm folds exactly the same sequence: ascending member
// rank. Benchmark mode folds pairwise as payloads arrive.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ogre/codec.hpp"
#include "ogre/fabric/cluster.hpp"
#include "ogre/kernel/kmeans.hpp"

namespace ogre::collectives {

enum class Algorithm { tree, recursive_doubling };

struct Options {
  Algorithm algorithm = Algorithm::tree;
  bool deterministic = true;
  bool compress = false;
};

struct CollectiveGroup {
  std::vector<fabric::Endpoint> members;  // index = rank
  std::uint64_t epoch = 0;

  void validate() const;
};

// Closed-form message counts for one call.
std::uint64_t tree_allreduce_messages(std::uint64_t p) noexcept;
std::uint64_t recursive_doubling_messages(std::uint64_t p) noexcept;

class Communicator {
 public:
  Communicator(fabric::Cluster& cluster, CollectiveGroup group, std::size_t rank,
               Options options = {});

  std::size_t rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return group_.members.size(); }
  const Options& options() const noexcept { return options_; }

  // Every member calls these in the same order.
  kernel::PartialSums allreduce(const kernel::PartialSums& local, std::size_t root = 0);
  // Folded result at `root`; nullopt elsewhere.
  std::optional<kernel::PartialSums> reduce(std::size_t root,
                                            const kernel::PartialSums& local);
  // `payload` is ignored on non-root members.
  Bytes broadcast(std::size_t root, Bytes payload);
  // Control-channel rendezvous; does not touch collective counters.
  void barrier();

 private:
  struct Contribution {
    std::uint32_t rank;
    kernel::PartialSums sums;
  };
  using Bundle = std::vector<Contribution>;

  std::uint64_t next_tag() noexcept;
  void send_bytes(std::size_t to, std::uint64_t tag, Bytes payload, fabric::Channel ch);
  Bytes recv_bytes(std::size_t from, std::uint64_t tag);
  Bytes encode_bundle(const Bundle& bundle) const;
  static Bundle decode_bundle(std::span<const std::byte> framed);
  void send_bundle(std::size_t to, std::uint64_t tag, const Bundle& bundle);
  Bundle recv_bundle(std::size_t from, std::uint64_t tag);
  void combine(Bundle& acc, Bundle incoming, bool incoming_is_lower) const;
  static kernel::PartialSums fold(Bundle bundle);

  kernel::PartialSums allreduce_tree(const kernel::PartialSums& local, std::size_t root);
  kernel::PartialSums allreduce_recursive_doubling(const kernel::PartialSums& local);
  std::optional<Bundle> tree_reduce(std::size_t root, Bundle acc, std::uint64_t tag);
  Bytes tree_broadcast(std::size_t root, Bytes payload, std::uint64_t tag,
                       fabric::Channel ch);

  fabric::Cluster& cluster_;
  CollectiveGroup group_;
  std::size_t rank_;
  Options options_;
  std::uint64_t seq_ = 0;
};

}  // namespace ogre::collectives
