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

#include "common.hpp"

#include "ogre/error.hpp"
#include "ogre/kernel/wire.hpp"

namespace ogre::engines {
namespace detail {

IterationClock::IterationClock(fabric::Metrics& metrics)
    : metrics_(metrics), origin_(metrics.snapshot()), last_(origin_),
      last_time_(std::chrono::steady_clock::now()) {}

void IterationClock::start() {
  std::lock_guard lock(mu_);
  last_ = metrics_.snapshot();
  load_ = last_ - origin_;
  last_time_ = std::chrono::steady_clock::now();
}

void IterationClock::mark(std::uint64_t iteration) {
  std::lock_guard lock(mu_);
  const auto now = std::chrono::steady_clock::now();
  const auto snap = metrics_.snapshot();
  stats_.push_back(IterationStats{iteration,
                                  std::chrono::duration<double>(now - last_time_).count(),
                                  snap - last_});
  last_ = snap;
  last_time_ = now;
}

fabric::MetricsRecord IterationClock::load() const {
  std::lock_guard lock(mu_);
  return load_;
}

std::vector<IterationStats> IterationClock::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

Bytes encode_sparse(const kernel::PartialSums& sums) {
  std::uint32_t present = 0;
  for (auto c : sums.counts) present += c > 0 ? 1 : 0;
  ByteWriter w;
  w.put_u32(present);
  for (std::size_t i = 0; i < sums.k; ++i) {
    if (sums.counts[i] == 0) continue;
    w.put_u32(static_cast<std::uint32_t>(i));
    w.put_f64s(sums.sum(i));
    w.put_u64(sums.counts[i]);
  }
  return std::move(w).take();
}

void scatter_sparse(std::span<const std::byte> bytes, kernel::PartialSums& into) {
  ByteReader r(bytes);
  const auto present = r.get_u32();
  for (std::uint32_t e = 0; e < present; ++e) {
    const auto key = r.get_u32();
    if (key >= into.k) fail(ErrorKind::io, "reduce output key out of range");
    r.get_f64s(std::span<double>(into.sums.data() + key * into.dims, into.dims));
    into.counts[key] = r.get_u64();
  }
  if (r.remaining() != 0) fail(ErrorKind::io, "trailing bytes in reduce output");
}

Bytes encode_trajectory(const kernel::KMeansResult& result) {
  ByteWriter w;
  w.put_u8(result.converged ? 1 : 0);
  w.put_u64(result.iterations);
  w.put_u64(result.trajectory.size());
  for (const auto& c : result.trajectory) {
    const auto b = kernel::to_bytes(c);
    w.put_u64(b.size());
    w.put_bytes(b);
  }
  return std::move(w).take();
}

kernel::KMeansResult decode_trajectory(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  kernel::KMeansResult out;
  out.converged = r.get_u8() != 0;
  out.iterations = r.get_u64();
  const auto n = r.get_u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = r.get_u64();
    out.trajectory.push_back(kernel::centroids_from_bytes(r.get_bytes(len)));
  }
  if (r.remaining() != 0) fail(ErrorKind::io, "trailing bytes in trajectory");
  if (out.trajectory.empty()) fail(ErrorKind::io, "empty trajectory");
  out.final_centroids = out.trajectory.back();
  return out;
}

void await_all(std::vector<std::future<fabric::TaskResult>>& futures, std::string_view what) {
  std::string first_error;
  for (auto& f : futures) {
    auto r = f.get();
    if (!r.ok && first_error.empty()) {
      first_error = std::string(what) + " task " + std::to_string(r.task_id) + " on node " +
                    std::to_string(r.node) + " failed: " + r.error;
    }
  }
  futures.clear();
  if (!first_error.empty()) fail(ErrorKind::run_failure, first_error);
}

std::uint32_t reducer_count(const EngineOptions& options, const fabric::ClusterTopology& topology) {
  return options.reducers == 0 ? topology.node_count : options.reducers;
}

RunFrame::RunFrame(Testbed& testbed, EngineKind engine, const EngineOptions& options,
                   const KMeansJob& job)
    : testbed_(testbed),
      engine_(engine),
      scheduler_(options.scheduler),
      before_(testbed.cluster().snapshot_metrics()),
      start_(std::chrono::steady_clock::now()),
      clock_(testbed.cluster().metrics()) {
  check_compatible(engine, options.scheduler);
  if (testbed.store().block_count() == 0) {
    fail(ErrorKind::invalid_argument, "no dataset has been ingested");
  }
  if (job.initial.k() == 0) fail(ErrorKind::invalid_argument, "no initial centroids");
  if (job.max_iter == 0) fail(ErrorKind::invalid_argument, "max_iter must be >= 1");
  if (!(job.epsilon >= 0.0)) fail(ErrorKind::invalid_argument, "epsilon must be >= 0");
  for (const auto& b : testbed.store().block_map()) {
    if (b.bytes != b.range.size() * job.initial.dims() * sizeof(double)) {
      fail(ErrorKind::shape_mismatch, "centroid dims do not match the ingested points");
    }
  }
}

EngineRun RunFrame::finish(kernel::KMeansResult result) {
  EngineRun run;
  run.engine = engine_;
  run.scheduler = scheduler_;
  run.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  run.metrics = testbed_.cluster().snapshot_metrics() - before_;
  run.load = clock_.load();
  run.iterations = clock_.stats();
  run.result = std::move(result);
  return run;
}

}  // namespace detail

std::string_view engine_name(EngineKind kind) noexcept {
  switch (kind) {
    case EngineKind::mapreduce:
      return "mapreduce";
    case EngineKind::iterative_collective:
      return "iterative";
    case EngineKind::message_passing:
      return "mpi-like";
    case EngineKind::pilot_mapreduce:
      return "pilot";
  }
  return "unknown";
}

std::optional<EngineKind> parse_engine(std::string_view name) noexcept {
  for (auto k : kAllEngines) {
    if (engine_name(k) == name) return k;
  }
  return std::nullopt;
}

bool compatible(EngineKind engine, sched::SchedulerKind scheduler) noexcept {
  using sched::SchedulerKind;
  switch (engine) {
    case EngineKind::mapreduce:
      return true;
    case EngineKind::iterative_collective:
      return scheduler == SchedulerKind::multilevel;
    case EngineKind::message_passing:
      return scheduler == SchedulerKind::centralized;
    case EngineKind::pilot_mapreduce:
      return scheduler != SchedulerKind::decentral;
  }
  return false;
}

void check_compatible(EngineKind engine, sched::SchedulerKind scheduler) {
  if (!compatible(engine, scheduler)) {
    fail(ErrorKind::invalid_argument, std::string("engine ") + std::string(engine_name(engine)) +
                                          " cannot run on the " +
                                          std::string(sched::scheduler_name(scheduler)) +
                                          " scheduler");
  }
}

sched::SchedulerKind default_scheduler(EngineKind engine) noexcept {
  switch (engine) {
    case EngineKind::message_passing:
    case EngineKind::pilot_mapreduce:
      return sched::SchedulerKind::centralized;
    case EngineKind::mapreduce:
    case EngineKind::iterative_collective:
      break;
  }
  return sched::SchedulerKind::multilevel;
}

Testbed::Testbed(TestbedConfig config) : config_(std::move(config)) {
  config_.topology.validate();
  cluster_ = std::make_unique<fabric::Cluster>(config_.topology);
  store_ = std::make_unique<store::BlockStore>(config_.store, config_.topology, cluster_->metrics());
  centralized_ = std::make_unique<sched::CentralizedScheduler>(config_.topology.node_count,
                                                               &cluster_->metrics());
  sched::ResourceManager::Options rm_options;
  rm_options.locality_wait_rounds = config_.locality_wait_rounds;
  rm_ = std::make_unique<sched::ResourceManager>(config_.topology, &cluster_->metrics(), rm_options);
  decentral_ = std::make_unique<sched::DecentralizedScheduler>(config_.topology.node_count,
                                                               config_.seed, config_.decentral_sample);
}

Testbed::~Testbed() {
  rm_.reset();
  cluster_->shutdown();
}

const store::BlockMap& Testbed::ingest(const dataset::PointFile& file, std::uint64_t block_points) {
  if (block_points == 0) {
    const std::uint64_t slots = config_.topology.total_slots();
    block_points = (file.size() + slots - 1) / slots;
  }
  const auto blocks = dataset::partition(file.size(), block_points);
  return store_->ingest(file, blocks);
}

EngineRun run_engine(EngineKind engine, Testbed& testbed, const KMeansJob& job,
                     const EngineOptions& options) {
  switch (engine) {
    case EngineKind::mapreduce:
      return run_mapreduce(testbed, job, options);
    case EngineKind::iterative_collective:
      return run_iterative_collective(testbed, job, options);
    case EngineKind::message_passing:
      return run_message_passing(testbed, job, options);
    case EngineKind::pilot_mapreduce:
      return run_pilot_mapreduce(testbed, job, options);
  }
  fail(ErrorKind::invalid_argument, "unknown engine");
}

}  // namespace ogre::engines
