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

#include "ogre/compress.hpp"

#include <zlib.h>

#include "ogre/error.hpp"

namespace ogre {

Bytes compress(std::span<const std::byte> raw) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  ByteWriter w(8 + bound);
  w.put_u64(raw.size());
  Bytes out = std::move(w).take();
  out.resize(8 + bound);
  const int rc = compress2(reinterpret_cast<Bytef*>(out.data() + 8), &bound,
                           reinterpret_cast<const Bytef*>(raw.data()),
                           static_cast<uLong>(raw.size()), Z_BEST_SPEED);
  if (rc != Z_OK) fail(ErrorKind::io, "deflate failed: " + std::to_string(rc));
  out.resize(8 + bound);
  return out;
}

Bytes decompress(std::span<const std::byte> packed) {
  ByteReader r(packed);
  const auto original = r.get_u64();
  Bytes out(original);
  uLongf out_len = static_cast<uLongf>(original);
  const int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &out_len,
                            reinterpret_cast<const Bytef*>(packed.data() + 8),
                            static_cast<uLong>(packed.size() - 8));
  if (rc != Z_OK || out_len != original) {
    fail(ErrorKind::io, "inflate failed: " + std::to_string(rc));
  }
  return out;
}

}  // namespace ogre
