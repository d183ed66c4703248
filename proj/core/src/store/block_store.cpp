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

#include "ogre/store/block_store.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <thread>

#include "ogre/error.hpp"

namespace ogre::store {

using fabric::Counter;

BlockStore::BlockStore(StoreConfig config, const fabric::ClusterTopology& topology,
                       fabric::Metrics& metrics)
    : config_(config), topology_(topology), metrics_(metrics) {
  topology_.validate();
  if (config_.replication == 0) fail(ErrorKind::invalid_argument, "replication must be >= 1");
  if (!(config_.local_bytes_per_s > 0.0) || !(config_.shared_cost_factor > 0.0)) {
    fail(ErrorKind::invalid_argument, "store cost parameters must be positive");
  }
}

const BlockMap& BlockStore::ingest(const dataset::PointFile& file,
                                   std::span<const dataset::BlockRange> blocks) {
  fabric::PhaseTimer timer(metrics_, fabric::Phase::ingest);
  const auto nodes = topology_.node_count;
  const auto copies = std::min<std::uint32_t>(config_.replication, nodes);
  std::mt19937_64 rng(config_.seed);
  const auto offset = static_cast<NodeId>(rng() % nodes);
  const auto d = file.dims();
  const auto values = file.values();

  BlockMap map;
  std::vector<std::shared_ptr<const Bytes>> payloads;
  std::uint64_t ingested = 0;
  for (const auto& range : blocks) {
    if (range.end > file.size() || range.begin > range.end) {
      fail(ErrorKind::invalid_argument, "block range outside the point file");
    }
    BlockInfo info;
    info.id = static_cast<std::uint32_t>(map.size());
    info.range = range;
    info.range.id = info.id;
    if (config_.mode == StoreMode::colocated) {
      for (std::uint32_t r = 0; r < copies; ++r) {
        info.replicas.push_back((offset + info.id + r) % nodes);
      }
    } else {
      info.replicas.push_back(kSharedStore);
    }
    auto bytes = dataset::encode_values(values.subspan(range.begin * d, range.size() * d));
    info.bytes = bytes.size();
    ingested += info.bytes * info.replicas.size();
    payloads.push_back(std::make_shared<const Bytes>(std::move(bytes)));
    map.push_back(std::move(info));
  }
  metrics_.add(Counter::store_ingest_bytes, ingested);

  std::lock_guard lock(mu_);
  blocks_ = std::move(map);
  block_bytes_ = std::move(payloads);
  return blocks_;
}

BlockMap BlockStore::block_map() const {
  std::lock_guard lock(mu_);
  return blocks_;
}

std::size_t BlockStore::block_count() const {
  std::lock_guard lock(mu_);
  return blocks_.size();
}

std::vector<NodeId> BlockStore::locate(std::uint32_t block) const {
  std::lock_guard lock(mu_);
  if (block >= blocks_.size()) {
    fail(ErrorKind::not_found, "unknown block " + std::to_string(block));
  }
  if (config_.mode == StoreMode::shared) return {};
  return blocks_[block].replicas;
}

ReadKind BlockStore::classify(NodeId reader, std::span<const NodeId> holders) const {
  if (config_.mode == StoreMode::shared) return ReadKind::shared;
  return std::find(holders.begin(), holders.end(), reader) != holders.end()
             ? ReadKind::local
             : ReadKind::remote;
}

void BlockStore::charge(std::uint64_t modeled_ns) {
  metrics_.add(Counter::modeled_io_ns, modeled_ns);
  if (config_.inject_delay) {
    std::this_thread::sleep_for(std::chrono::nanoseconds(modeled_ns));
  }
}

void BlockStore::account_read(NodeId reader, NodeId home, std::uint64_t bytes,
                              ReadKind kind) {
  metrics_.add(Counter::store_reads);
  metrics_.add(Counter::store_bytes_read, bytes);
  const double local_s = static_cast<double>(bytes) / config_.local_bytes_per_s;
  double seconds = local_s;
  switch (kind) {
    case ReadKind::local:
      break;
    case ReadKind::remote:
      if (reader != home) {
        metrics_.add(Counter::network_messages);
        metrics_.add(Counter::network_bytes, bytes);
      }
      seconds += std::chrono::duration<double>(topology_.link.transfer_time(bytes)).count();
      break;
    case ReadKind::shared:
      metrics_.add(Counter::shared_store_bytes_read, bytes);
      seconds = local_s * config_.shared_cost_factor;
      break;
  }
  charge(static_cast<std::uint64_t>(seconds * 1e9));
}

BlockRead BlockStore::read(NodeId reader, std::uint32_t block) {
  if (reader >= topology_.node_count) {
    fail(ErrorKind::invalid_argument, "unknown reader node " + std::to_string(reader));
  }
  std::shared_ptr<const Bytes> payload;
  std::vector<NodeId> holders;
  {
    std::lock_guard lock(mu_);
    if (block >= blocks_.size()) {
      fail(ErrorKind::not_found, "unknown block " + std::to_string(block));
    }
    payload = block_bytes_[block];
    holders = blocks_[block].replicas;
  }
  const auto kind = classify(reader, holders);
  metrics_.add(kind == ReadKind::local ? Counter::locality_hits : Counter::locality_misses);
  account_read(reader, holders.front(), payload->size(), kind);
  return BlockRead{*payload, kind};
}

ObjectHandle BlockStore::write(NodeId writer, const std::string& name, Bytes bytes) {
  if (writer >= topology_.node_count) {
    fail(ErrorKind::invalid_argument, "unknown writer node " + std::to_string(writer));
  }
  const std::uint64_t size = bytes.size();
  const NodeId home = config_.mode == StoreMode::shared ? kSharedStore : writer;
  ObjectHandle handle{name, home, size, 1};
  {
    std::lock_guard lock(mu_);
    auto it = objects_.find(name);
    if (it != objects_.end()) {
      if (!config_.allow_overwrite) {
        fail(ErrorKind::invalid_argument, "object already exists: " + name);
      }
      handle.version = it->second.version + 1;
    }
    objects_[name] = Object{home, handle.version,
                            std::make_shared<const Bytes>(std::move(bytes))};
  }
  metrics_.add(Counter::store_writes);
  metrics_.add(Counter::store_bytes_written, size);
  double seconds = static_cast<double>(size) / config_.local_bytes_per_s;
  if (config_.mode == StoreMode::shared) seconds *= config_.shared_cost_factor;
  charge(static_cast<std::uint64_t>(seconds * 1e9));
  return handle;
}

Bytes BlockStore::read_object(NodeId reader, const std::string& name) {
  if (reader >= topology_.node_count) {
    fail(ErrorKind::invalid_argument, "unknown reader node " + std::to_string(reader));
  }
  Object obj;
  {
    std::lock_guard lock(mu_);
    auto it = objects_.find(name);
    if (it == objects_.end()) fail(ErrorKind::not_found, "unknown object " + name);
    obj = it->second;
  }
  const NodeId holders[] = {obj.home};
  account_read(reader, obj.home, obj.bytes->size(), classify(reader, holders));
  return *obj.bytes;
}

bool BlockStore::contains(const std::string& name) const {
  std::lock_guard lock(mu_);
  return objects_.contains(name);
}

}  // namespace ogre::store
