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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ogre/codec.hpp"
#include "ogre/kernel/kmeans.hpp"

namespace ogre::dataset {

struct ScenarioSpec {
  std::uint64_t n_points = 0;
  std::uint64_t k_clusters = 0;
  std::uint32_t dims = 3;
  std::uint64_t seed = 42;
  std::uint64_t max_iter = 10;
  double epsilon = 1e-4;

  // Throws invalid_argument when n == 0, k == 0, k > n, dims == 0,
  // max_iter == 0 or epsilon < 0.
  void validate() const;
};

// Point file layout (all little-endian):
//   0..3   magic "OGRE"
//   4..7   version, u32 = 1
//   8..15  n, u64
//   16..19 d, u32
//   20..   n * d f64, row-major
inline constexpr std::array<char, 4> kMagic = {'O', 'G', 'R', 'E'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 20;

class PointFile {
 public:
  PointFile() = default;
  PointFile(std::uint32_t dims, std::vector<double> values);

  std::uint64_t size() const noexcept { return dims_ == 0 ? 0 : values_.size() / dims_; }
  std::uint32_t dims() const noexcept { return dims_; }
  std::span<const double> values() const noexcept { return values_; }
  kernel::PointView view() const { return kernel::PointView(values_, dims_); }

  Bytes encode() const;
  static PointFile decode(std::span<const std::byte> bytes);

  void write(const std::filesystem::path& path) const;
  static PointFile read(const std::filesystem::path& path);

  bool operator==(const PointFile&) const = default;

 private:
  std::uint32_t dims_ = 0;
  std::vector<double> values_;
};

// Seeded isotropic Gaussian blobs. Blob centers sit on a regular grid with
// unit spacing; point i belongs to blob i % k.
PointFile generate(const ScenarioSpec& spec);

inline constexpr double kBlobSpacing = 1.0;
inline constexpr double kBlobStddev = 0.05 * kBlobSpacing;

struct BlockRange {
  std::uint32_t id = 0;
  std::uint64_t begin = 0;
  std::uint64_t end = 0;

  std::uint64_t size() const noexcept { return end - begin; }
  bool operator==(const BlockRange&) const = default;
};

// ceil(n / block_points) contiguous ranges; only the last may be short.
std::vector<BlockRange> partition(std::uint64_t n, std::uint64_t block_points);

// k distinct point indices drawn without replacement.
kernel::CentroidSet init_centroids(const PointFile& file, std::size_t k,
                                   std::uint64_t seed);

Bytes encode_values(std::span<const double> values);
std::vector<double> decode_values(std::span<const std::byte> bytes);

}  // namespace ogre::dataset
