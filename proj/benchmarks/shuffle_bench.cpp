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

#include <benchmark/benchmark.h>

#include <array>
#include <cstring>

#include "ogre/engines/shuffle.hpp"
#include "ogre/fabric/metrics.hpp"

namespace {

using namespace ogre;

// Map-side buffer for 100k point records (key + 3 doubles) into 4 partitions.
// 1 GiB keeps everything in memory; 256 KiB forces spills.
void BM_MapOutputBuffer(benchmark::State& state) {
  const auto threshold = static_cast<std::uint64_t>(state.range(0));
  constexpr std::size_t kPayload = 3 * sizeof(double);
  std::array<std::byte, kPayload> payload{};
  const double coords[3] = {0.25, 0.5, 0.75};
  std::memcpy(payload.data(), coords, kPayload);
  engines::ScratchDir scratch;
  fabric::Metrics metrics;
  for (auto _ : state) {
    engines::MapOutputBuffer buf(4 + kPayload, 4, threshold, scratch, metrics);
    for (std::uint32_t i = 0; i < 100'000; ++i) buf.emit((i * 2654435761u) % 500, payload);
    benchmark::DoNotOptimize(buf.finish());
  }
  state.SetBytesProcessed(state.iterations() * 100'000 * static_cast<std::int64_t>(4 + kPayload));
}
BENCHMARK(BM_MapOutputBuffer)->Arg(1 << 30)->Arg(256 << 10)->Unit(benchmark::kMillisecond);

}  // namespace
