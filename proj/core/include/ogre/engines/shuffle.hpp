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

// Sort-based shuffle: map-side buffering with sorted spills, and the
// reduce-side merge. Records are fixed size and start with a u32 key; equal
// keys keep their emission order (map order on the reduce side), which is what
// makes reducer sums match a sequential pass.

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ogre/codec.hpp"
#include "ogre/fabric/metrics.hpp"

namespace ogre::engines {

// Key plus `dims` coordinates.
constexpr std::size_t shuffle_record_bytes(std::size_t dims) noexcept { return 4 + 8 * dims; }
// Combined records also carry a u64 member count.
constexpr std::size_t combined_record_bytes(std::size_t dims) noexcept { return 12 + 8 * dims; }

// $OGREBENCH_WORKDIR, else <tmp>/ogrebench.
std::filesystem::path default_workdir();

// Private scratch directory, deleted with its contents on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::filesystem::path& root = default_workdir());
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  // Fresh file name inside the directory; thread-safe.
  std::filesystem::path next_file(const std::string& stem);

 private:
  std::filesystem::path path_;
  std::atomic<std::uint64_t> counter_{0};
};

void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes);
Bytes read_file(const std::filesystem::path& path);

std::uint32_t record_key(const std::byte* record) noexcept;

// K-way merge of sorted runs; ties go to the lower run index.
Bytes merge_runs(const std::vector<std::span<const std::byte>>& runs, std::size_t record_bytes);

class MapOutputBuffer {
 public:
  MapOutputBuffer(std::size_t record_bytes, std::uint32_t partitions,
                  std::uint64_t spill_threshold, ScratchDir& scratch, fabric::Metrics& metrics);

  // Appends key + payload to partition key % partitions.
  void emit(std::uint32_t key, std::span<const std::byte> payload);
  // One key-sorted segment per partition.
  std::vector<Bytes> finish();

  std::uint64_t records() const noexcept { return records_; }
  std::uint32_t spills() const noexcept { return spills_; }  // survives finish()

 private:
  struct Entry {
    std::uint32_t partition;
    std::uint32_t key;
    std::uint64_t offset;
  };
  struct Run {
    std::filesystem::path file;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> extents;  // per partition
  };
  std::vector<Bytes> sort_buffer();
  void spill();

  std::size_t record_bytes_;
  std::uint32_t partitions_;
  std::uint64_t threshold_;
  std::uint32_t spills_ = 0;
  ScratchDir& scratch_;
  fabric::Metrics& metrics_;
  Bytes buffer_;
  std::vector<Entry> index_;
  std::vector<Run> runs_;
  std::uint64_t records_ = 0;
};

// Reduce-side input. Segments must be added in map order; once the held bytes
// pass the threshold they are merged and spilled as one run.
class ReduceMerger {
 public:
  ReduceMerger(std::size_t record_bytes, std::uint64_t spill_threshold, ScratchDir& scratch,
               fabric::Metrics& metrics);

  void add(Bytes sorted_segment);
  // Records in key order, ties in arrival order.
  void for_each(const std::function<void(const std::byte* record)>& visit);

  std::uint32_t spills() const noexcept { return static_cast<std::uint32_t>(spilled_.size()); }

 private:
  void spill();

  std::size_t record_bytes_;
  std::uint64_t threshold_;
  ScratchDir& scratch_;
  fabric::Metrics& metrics_;
  std::vector<Bytes> held_;
  std::uint64_t held_bytes_ = 0;
  std::vector<std::filesystem::path> spilled_;
};

}  // namespace ogre::engines
