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

#include "ogre/kernel/wire.hpp"

#include "ogre/error.hpp"

namespace ogre::kernel {

void encode(ByteWriter& w, const PartialSums& p) {
  w.put_u32(static_cast<std::uint32_t>(p.k));
  w.put_u32(static_cast<std::uint32_t>(p.dims));
  w.put_f64s(p.sums);
  w.put_u64s(p.counts);
}

std::size_t encoded_size(const PartialSums& p) noexcept {
  return 8 + p.k * p.dims * 8 + p.k * 8;
}

PartialSums decode_partial_sums(ByteReader& r) {
  const auto k = r.get_u32();
  const auto d = r.get_u32();
  auto p = PartialSums::zero(k, d);
  r.get_f64s(p.sums);
  r.get_u64s(p.counts);
  return p;
}

void encode(ByteWriter& w, const CentroidSet& c) {
  w.put_u64(c.iteration());
  w.put_u32(static_cast<std::uint32_t>(c.k()));
  w.put_u32(static_cast<std::uint32_t>(c.dims()));
  w.put_f64s(c.coords());
}

CentroidSet decode_centroids(ByteReader& r) {
  const auto iteration = r.get_u64();
  const auto k = r.get_u32();
  const auto d = r.get_u32();
  std::vector<double> coords(static_cast<std::size_t>(k) * d);
  r.get_f64s(coords);
  return CentroidSet(d, std::move(coords), iteration);
}

Bytes to_bytes(const PartialSums& p) {
  ByteWriter w(encoded_size(p));
  encode(w, p);
  return std::move(w).take();
}

Bytes to_bytes(const CentroidSet& c) {
  ByteWriter w(16 + c.coords().size() * 8);
  encode(w, c);
  return std::move(w).take();
}

PartialSums partial_sums_from_bytes(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  auto p = decode_partial_sums(r);
  if (r.remaining() != 0) fail(ErrorKind::io, "trailing bytes after partial sums");
  return p;
}

CentroidSet centroids_from_bytes(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  auto c = decode_centroids(r);
  if (r.remaining() != 0) fail(ErrorKind::io, "trailing bytes after centroid set");
  return c;
}

}  // namespace ogre::kernel
