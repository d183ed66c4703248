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

#include "ogre/fabric/metrics.hpp"

namespace ogre::fabric {

std::string_view counter_name(Counter c) noexcept {
  switch (c) {
    case Counter::map_output_bytes: return "map_output_bytes";
    case Counter::shuffle_bytes: return "shuffle_bytes";
    case Counter::spill_bytes: return "spill_bytes";
    case Counter::spill_files: return "spill_files";
    case Counter::network_messages: return "network_messages";
    case Counter::network_bytes: return "network_bytes";
    case Counter::intra_node_messages: return "intra_node_messages";
    case Counter::intra_node_bytes: return "intra_node_bytes";
    case Counter::collective_messages: return "collective_messages";
    case Counter::collective_bytes: return "collective_bytes";
    case Counter::store_reads: return "store_reads";
    case Counter::store_bytes_read: return "store_bytes_read";
    case Counter::shared_store_bytes_read: return "shared_store_bytes_read";
    case Counter::store_writes: return "store_writes";
    case Counter::store_bytes_written: return "store_bytes_written";
    case Counter::store_ingest_bytes: return "store_ingest_bytes";
    case Counter::modeled_io_ns: return "modeled_io_ns";
    case Counter::jobs_launched: return "jobs_launched";
    case Counter::tasks_launched: return "tasks_launched";
    case Counter::container_grants: return "container_grants";
    case Counter::locality_hits: return "locality_hits";
    case Counter::locality_misses: return "locality_misses";
    case Counter::kCount: break;
  }
  return "unknown";
}

std::string_view phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::ingest: return "ingest";
    case Phase::load: return "load";
    case Phase::job_launch: return "job_launch";
    case Phase::map: return "map";
    case Phase::shuffle: return "shuffle";
    case Phase::reduce: return "reduce";
    case Phase::compute: return "compute";
    case Phase::collective: return "collective";
    case Phase::persist: return "persist";
    case Phase::kCount: break;
  }
  return "unknown";
}

MetricsRecord MetricsRecord::operator-(const MetricsRecord& earlier) const noexcept {
  MetricsRecord out = *this;
  for (std::size_t i = 0; i < kCounterCount; ++i) out.counters[i] -= earlier.counters[i];
  for (std::size_t i = 0; i < kPhaseCount; ++i) out.phase_ns[i] -= earlier.phase_ns[i];
  return out;
}

void Metrics::observe_generations(std::uint64_t live) noexcept {
  auto cur = peak_generations_.load(std::memory_order_relaxed);
  while (live > cur &&
         !peak_generations_.compare_exchange_weak(cur, live, std::memory_order_relaxed)) {
  }
}

MetricsRecord Metrics::snapshot() const noexcept {
  MetricsRecord r;
  for (std::size_t i = 0; i < kCounterCount; ++i) {
    r.counters[i] = counters_[i].load(std::memory_order_relaxed);
  }
  for (std::size_t i = 0; i < kPhaseCount; ++i) {
    r.phase_ns[i] = phase_ns_[i].load(std::memory_order_relaxed);
  }
  r.peak_resident_generations = peak_generations_.load(std::memory_order_relaxed);
  return r;
}

}  // namespace ogre::fabric
