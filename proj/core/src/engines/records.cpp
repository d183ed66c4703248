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

#include "ogre/engines/records.hpp"

#include "ogre/error.hpp"

namespace ogre::engines {

Records to_records(std::span<const double> values, std::size_t dims, std::uint64_t first_index) {
  if (dims == 0 || values.size() % dims != 0) {
    fail(ErrorKind::shape_mismatch, "value count is not a multiple of dims");
  }
  const std::size_t n = values.size() / dims;
  Records out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto* p = values.data() + i * dims;
    out.push_back(Record{static_cast<std::uint32_t>(first_index + i),
                         std::vector<double>(p, p + dims)});
  }
  return out;
}

Records to_records(const kernel::CentroidSet& centroids) {
  return to_records(centroids.coords(), centroids.dims(), 0);
}

}  // namespace ogre::engines
