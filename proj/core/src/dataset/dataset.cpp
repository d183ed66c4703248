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

#include "ogre/dataset/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>
#include <ranges>

#include "ogre/error.hpp"

namespace ogre::dataset {

void ScenarioSpec::validate() const {
  if (n_points == 0) fail(ErrorKind::invalid_argument, "n_points must be >= 1");
  if (k_clusters == 0) fail(ErrorKind::invalid_argument, "k_clusters must be >= 1");
  if (k_clusters > n_points) {
    fail(ErrorKind::invalid_argument, "k_clusters must not exceed n_points");
  }
  if (dims == 0) fail(ErrorKind::invalid_argument, "dims must be >= 1");
  if (max_iter == 0) fail(ErrorKind::invalid_argument, "max_iter must be >= 1");
  if (!(epsilon >= 0.0)) fail(ErrorKind::invalid_argument, "epsilon must be >= 0");
}

PointFile::PointFile(std::uint32_t dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  if (dims_ == 0) fail(ErrorKind::invalid_argument, "dims must be >= 1");
  if (values_.size() % dims_ != 0) {
    fail(ErrorKind::shape_mismatch, "value count not a multiple of dims");
  }
}

Bytes PointFile::encode() const {
  ByteWriter w(kHeaderBytes + values_.size() * sizeof(double));
  for (char c : kMagic) w.put_u8(static_cast<std::uint8_t>(c));
  w.put_u32(kFormatVersion);
  w.put_u64(size());
  w.put_u32(dims_);
  w.put_f64s(values_);
  return std::move(w).take();
}

PointFile PointFile::decode(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < kHeaderBytes) fail(ErrorKind::io, "point file: short header");
  for (char c : kMagic) {
    if (r.get_u8() != static_cast<std::uint8_t>(c)) {
      fail(ErrorKind::io, "point file: bad magic");
    }
  }
  const auto version = r.get_u32();
  if (version != kFormatVersion) {
    fail(ErrorKind::io, "point file: unsupported version " + std::to_string(version));
  }
  const auto n = r.get_u64();
  const auto d = r.get_u32();
  if (d == 0) fail(ErrorKind::io, "point file: zero dimension");
  if (r.remaining() / sizeof(double) / d < n ||
      r.remaining() != n * d * sizeof(double)) {
    fail(ErrorKind::io, "point file: payload length does not match header");
  }
  std::vector<double> values(n * d);
  r.get_f64s(values);
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::io, "point file: non-finite coordinate");
  }
  return PointFile(d, std::move(values));
}

void PointFile::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open for writing: " + path.string());
  const auto bytes = encode();
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

PointFile PointFile::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open for reading: " + path.string());
  Bytes bytes;
  in.seekg(0, std::ios::end);
  bytes.resize(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in) fail(ErrorKind::io, "read failed: " + path.string());
  return decode(bytes);
}

PointFile generate(const ScenarioSpec& spec) {
  spec.validate();
  const std::uint64_t k = spec.k_clusters;
  const std::uint32_t d = spec.dims;

  // Smallest grid side g with g^d >= k.
  std::uint64_t side = 1;
  while (std::pow(static_cast<double>(side), static_cast<double>(d)) <
         static_cast<double>(k)) {
    ++side;
  }

  std::vector<double> centers(k * d);
  for (std::uint64_t c = 0; c < k; ++c) {
    std::uint64_t cell = c;
    for (std::uint32_t j = 0; j < d; ++j) {
      centers[c * d + j] = static_cast<double>(cell % side + 1) * kBlobSpacing;
      cell /= side;
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, kBlobStddev);
  std::vector<double> values(spec.n_points * d);
  for (std::uint64_t i = 0; i < spec.n_points; ++i) {
    const double* center = centers.data() + (i % k) * d;
    for (std::uint32_t j = 0; j < d; ++j) {
      values[i * d + j] = center[j] + noise(rng);
    }
  }
  return PointFile(d, std::move(values));
}

std::vector<BlockRange> partition(std::uint64_t n, std::uint64_t block_points) {
  if (block_points == 0) fail(ErrorKind::invalid_argument, "block_points must be >= 1");
  std::vector<BlockRange> blocks;
  blocks.reserve((n + block_points - 1) / block_points);
  for (std::uint64_t begin = 0; begin < n; begin += block_points) {
    blocks.push_back({static_cast<std::uint32_t>(blocks.size()), begin,
                      std::min(n, begin + block_points)});
  }
  return blocks;
}

kernel::CentroidSet init_centroids(const PointFile& file, std::size_t k,
                                   std::uint64_t seed) {
  const auto n = file.size();
  if (k == 0) fail(ErrorKind::invalid_argument, "k must be >= 1");
  if (k > n) fail(ErrorKind::invalid_argument, "k exceeds the number of points");

  std::mt19937_64 rng(seed);
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::invalid_argument, "too many points for centroid sampling");
  }
  // iota is only an input range to the legacy algorithm, so the output must
  // be random access (reservoir sampling).
  std::vector<std::uint32_t> picked(k);
  auto all = std::views::iota(std::uint32_t{0}, static_cast<std::uint32_t>(n));
  std::sample(all.begin(), all.end(), picked.begin(), static_cast<std::ptrdiff_t>(k), rng);

  const auto d = file.dims();
  std::vector<double> coords;
  coords.reserve(k * d);
  auto points = file.view();
  for (auto idx : picked) {
    auto p = points[idx];
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return kernel::CentroidSet(d, std::move(coords), 0);
}

Bytes encode_values(std::span<const double> values) {
  ByteWriter w(values.size_bytes());
  w.put_f64s(values);
  return std::move(w).take();
}

std::vector<double> decode_values(std::span<const std::byte> bytes) {
  if (bytes.size() % sizeof(double) != 0) fail(ErrorKind::io, "ragged f64 payload");
  std::vector<double> values(bytes.size() / sizeof(double));
  ByteReader(bytes).get_f64s(values);
  return values;
}

}  // namespace ogre::dataset
