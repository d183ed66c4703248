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

// Lossless payload compression (zlib deflate) behind a stable interface.

#pragma once

#include <span>

#include "ogre/codec.hpp"

namespace ogre {

// Output: u64 LE original length followed by the deflate stream.
Bytes compress(std::span<const std::byte> raw);
Bytes decompress(std::span<const std::byte> packed);

}  // namespace ogre
