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

// Simulated storage layer. In colocated mode blocks are replicated onto the
// compute nodes and reads from a replica holder are free of network traffic.
// In shared mode every block and object lives on one remote store that
// exposes no locality at all.

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "ogre/codec.hpp"
#include "ogre/dataset/dataset.hpp"
#include "ogre/fabric/cluster.hpp"
#include "ogre/fabric/metrics.hpp"

namespace ogre::store {

using fabric::NodeId;

enum class StoreMode { colocated, shared };

// Pseudo-node id of the shared store.
inline constexpr NodeId kSharedStore = std::numeric_limits<NodeId>::max();

struct StoreConfig {
  StoreMode mode = StoreMode::colocated;
  std::uint32_t replication = 3;
  std::uint64_t seed = 42;
  // Modeled local-disk throughput; shared reads cost `shared_cost_factor`
  // times as much per byte.
  double local_bytes_per_s = 1.0e9;
  double shared_cost_factor = 4.0;
  bool inject_delay = false;
  bool allow_overwrite = true;
};

struct BlockInfo {
  std::uint32_t id = 0;
  dataset::BlockRange range;
  std::vector<NodeId> replicas;  // {kSharedStore} in shared mode
  std::uint64_t bytes = 0;
};

using BlockMap = std::vector<BlockInfo>;

enum class ReadKind { local, remote, shared };

struct BlockRead {
  Bytes bytes;
  ReadKind kind = ReadKind::local;
};

struct ObjectHandle {
  std::string name;
  NodeId home = 0;
  std::uint64_t bytes = 0;
  std::uint64_t version = 0;
};

class BlockStore {
 public:
  BlockStore(StoreConfig config, const fabric::ClusterTopology& topology,
             fabric::Metrics& metrics);

  StoreMode mode() const noexcept { return config_.mode; }
  const StoreConfig& config() const noexcept { return config_; }

  // Replicas go round-robin over the nodes from a seeded starting offset.
  // Replaces any previously ingested dataset.
  const BlockMap& ingest(const dataset::PointFile& file,
                         std::span<const dataset::BlockRange> blocks);
  BlockMap block_map() const;
  std::size_t block_count() const;

  // Replica holders; empty in shared mode.
  std::vector<NodeId> locate(std::uint32_t block) const;

  BlockRead read(NodeId reader, std::uint32_t block);

  ObjectHandle write(NodeId writer, const std::string& name, Bytes bytes);
  Bytes read_object(NodeId reader, const std::string& name);
  bool contains(const std::string& name) const;

 private:
  struct Object {
    NodeId home;
    std::uint64_t version;
    std::shared_ptr<const Bytes> bytes;
  };

  void account_read(NodeId reader, NodeId home, std::uint64_t bytes, ReadKind kind);
  void charge(std::uint64_t modeled_ns);
  ReadKind classify(NodeId reader, std::span<const NodeId> holders) const;

  StoreConfig config_;
  fabric::ClusterTopology topology_;
  fabric::Metrics& metrics_;

  mutable std::mutex mu_;
  BlockMap blocks_;
  std::vector<std::shared_ptr<const Bytes>> block_bytes_;
  std::map<std::string, Object> objects_;
};

}  // namespace ogre::store
