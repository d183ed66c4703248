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
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace ogre::fabric {

enum class Counter : std::size_t {
  map_output_bytes,
  shuffle_bytes,
  spill_bytes,
  spill_files,
  network_messages,
  network_bytes,
  intra_node_messages,
  intra_node_bytes,
  collective_messages,
  collective_bytes,
  store_reads,
  store_bytes_read,
  shared_store_bytes_read,
  store_writes,
  store_bytes_written,
  store_ingest_bytes,
  modeled_io_ns,
  jobs_launched,
  tasks_launched,
  container_grants,
  locality_hits,
  locality_misses,
  kCount,
};

enum class Phase : std::size_t {
  ingest,
  load,
  job_launch,
  map,
  shuffle,
  reduce,
  compute,
  collective,
  persist,
  kCount,
};

inline constexpr std::size_t kCounterCount = static_cast<std::size_t>(Counter::kCount);
inline constexpr std::size_t kPhaseCount = static_cast<std::size_t>(Phase::kCount);

std::string_view counter_name(Counter c) noexcept;
std::string_view phase_name(Phase p) noexcept;

// Point-in-time copy of the collector.
struct MetricsRecord {
  std::array<std::uint64_t, kCounterCount> counters{};
  std::array<std::uint64_t, kPhaseCount> phase_ns{};
  std::uint64_t peak_resident_generations = 0;

  std::uint64_t operator[](Counter c) const noexcept {
    return counters[static_cast<std::size_t>(c)];
  }
  double phase_seconds(Phase p) const noexcept {
    return static_cast<double>(phase_ns[static_cast<std::size_t>(p)]) * 1e-9;
  }

  // Counter-wise difference; the generation gauge is taken from `this`.
  MetricsRecord operator-(const MetricsRecord& earlier) const noexcept;
  bool operator==(const MetricsRecord&) const = default;
};

// Concurrently updatable counters. Each counter is individually atomic;
// a snapshot is not a global transaction.
class Metrics {
 public:
  void add(Counter c, std::uint64_t delta = 1) noexcept {
    counters_[static_cast<std::size_t>(c)].fetch_add(delta, std::memory_order_relaxed);
  }
  void add_phase(Phase p, std::chrono::nanoseconds ns) noexcept {
    phase_ns_[static_cast<std::size_t>(p)].fetch_add(
        static_cast<std::uint64_t>(ns.count()), std::memory_order_relaxed);
  }
  void observe_generations(std::uint64_t live) noexcept;

  MetricsRecord snapshot() const noexcept;

 private:
  std::array<std::atomic<std::uint64_t>, kCounterCount> counters_{};
  std::array<std::atomic<std::uint64_t>, kPhaseCount> phase_ns_{};
  std::atomic<std::uint64_t> peak_generations_{0};
};

// Adds the scope's wall time to a phase.
class PhaseTimer {
 public:
  PhaseTimer(Metrics& metrics, Phase phase)
      : metrics_(metrics), phase_(phase), start_(std::chrono::steady_clock::now()) {}
  ~PhaseTimer() {
    metrics_.add_phase(phase_, std::chrono::steady_clock::now() - start_);
  }
  PhaseTimer(const PhaseTimer&) = delete;
  PhaseTimer& operator=(const PhaseTimer&) = delete;

 private:
  Metrics& metrics_;
  Phase phase_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace ogre::fabric
