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

// Wire encodings for the kernel state that crosses node boundaries.

#pragma once

#include <span>

#include "ogre/codec.hpp"
#include "ogre/kernel/kmeans.hpp"

namespace ogre::kernel {

// u32 k, u32 d, k*d f64 sums, k u64 counts.
void encode(ByteWriter& w, const PartialSums& p);
PartialSums decode_partial_sums(ByteReader& r);
std::size_t encoded_size(const PartialSums& p) noexcept;

// u64 iteration, u32 k, u32 d, k*d f64.
void encode(ByteWriter& w, const CentroidSet& c);
CentroidSet decode_centroids(ByteReader& r);

Bytes to_bytes(const PartialSums& p);
Bytes to_bytes(const CentroidSet& c);
PartialSums partial_sums_from_bytes(std::span<const std::byte> bytes);
CentroidSet centroids_from_bytes(std::span<const std::byte> bytes);

}  // namespace ogre::kernel
