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

// Record-oriented data model of the key/value engines. Each record owns its
// value on the heap, the way a JVM object graph does; the message-passing
// engine alone works on flat primitive arrays.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ogre/kernel/kmeans.hpp"

namespace ogre::engines {

struct Record {
  std::uint32_t key = 0;
  std::vector<double> value;
};

using Records = std::vector<Record>;

// Read-only slice of records resident on one worker. Derived partitions get
// the next generation number; nothing is ever updated in place.
class InMemoryPartition {
 public:
  InMemoryPartition() = default;
  InMemoryPartition(std::uint64_t generation, Records records)
      : generation_(generation),
        records_(std::make_shared<const Records>(std::move(records))) {}

  std::uint64_t generation() const noexcept { return generation_; }
  const Records& records() const noexcept { return *records_; }
  std::size_t size() const noexcept { return records_ ? records_->size() : 0; }

 private:
  std::uint64_t generation_ = 0;
  std::shared_ptr<const Records> records_ = std::make_shared<const Records>();
};

// One record per point; the key is the point's global index.
Records to_records(std::span<const double> values, std::size_t dims, std::uint64_t first_index);
// One record per centroid, keyed by centroid id.
Records to_records(const kernel::CentroidSet& centroids);

inline std::size_t nearest(const Record& point, const Records& centroids) {
  return kernel::nearest(point.value, centroids.size(),
                         [&](std::size_t i) -> const std::vector<double>& {
                           return centroids[i].value;
                         });
}

}  // namespace ogre::engines
