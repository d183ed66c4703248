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

// Pilot MapReduce: one pilot allocation for the whole run; map and reduce
// tasks are compute units inside it, and intermediate data moves as whole
// files through the store with no sorting.

#include <cstring>

#include "common.hpp"
#include "ogre/engines/records.hpp"
#include "ogre/engines/shuffle.hpp"
#include "ogre/error.hpp"
#include "ogre/kernel/wire.hpp"
#include "ogre/sched/pilot.hpp"

namespace ogre::engines {
namespace {

using detail::kDriverNode;
using fabric::Counter;
using fabric::NodeId;
using fabric::Phase;

constexpr const char* kCentroidObject = "pilot/centroids";

std::string exchange_file(std::size_t map, std::uint32_t reducer) {
  return "pilot/map-" + std::to_string(map) + "/part-" + std::to_string(reducer);
}

std::string reduce_file(std::uint32_t reducer) { return "pilot/reduce-" + std::to_string(reducer); }

}  // namespace

EngineRun run_pilot_mapreduce(Testbed& tb, const KMeansJob& job, const EngineOptions& opt) {
  detail::RunFrame frame(tb, EngineKind::pilot_mapreduce, opt, job);
  auto& cluster = tb.cluster();
  auto& metrics = cluster.metrics();
  auto& store = tb.store();
  const auto blocks = store.block_map();
  const std::size_t k = job.initial.k();
  const std::size_t d = job.initial.dims();
  const std::uint32_t reducers = detail::reducer_count(opt, cluster.topology());
  const std::size_t record_bytes = shuffle_record_bytes(d);
  const std::uint32_t nodes = cluster.topology().node_count;

  sched::PilotOptions popts{opt.cu_launch, "pilot"};
  auto pilot = opt.scheduler == sched::SchedulerKind::centralized
                   ? sched::Pilot::acquire(cluster, tb.centralized(), nodes, popts)
                   : sched::Pilot::acquire(cluster, tb.resource_manager(), nodes, popts);

  store.write(kDriverNode, kCentroidObject, kernel::to_bytes(job.initial));
  frame.clock().start();

  kernel::KMeansResult result;
  result.trajectory.push_back(job.initial);
  kernel::CentroidSet current = job.initial;
  std::uint64_t files = 0;

  for (std::uint64_t iter = 1; iter <= job.max_iter; ++iter) {
    std::vector<std::future<fabric::TaskResult>> futures;
    for (std::size_t m = 0; m < blocks.size(); ++m) {
      const auto block = blocks[m];
      auto body = [&, m, block, iter](fabric::TaskContext& ctx) {
        fabric::PhaseTimer timer(metrics, Phase::map);
        const NodeId node = ctx.node();
        const auto centroids = to_records(
            kernel::centroids_from_bytes(store.read_object(node, kCentroidObject)));
        const auto input = store.read(node, block.id);
        const auto points = to_records(dataset::decode_values(input.bytes), d, block.range.begin);
        std::vector<Bytes> parts(reducers);
        for (const auto& p : points) {
          const auto key = static_cast<std::uint32_t>(detail::apply_fault(
              nearest(p, centroids), iter, p.key, k, opt.inject_assignment_fault));
          auto& part = parts[key % reducers];
          const auto at = part.size();
          part.resize(at + record_bytes);
          std::memcpy(part.data() + at, &key, 4);
          std::memcpy(part.data() + at + 4, p.value.data(), 8 * d);
        }
        metrics.add(Counter::map_output_bytes, points.size() * record_bytes);
        for (std::uint32_t r = 0; r < reducers; ++r) {
          store.write(node, exchange_file(m, r), std::move(parts[r]));
        }
      };
      futures.push_back(pilot->submit_cu(
          fabric::TaskSpec{0, fabric::TaskKind::compute_unit, {}, "map-" + std::to_string(m)},
          std::move(body)));
    }
    detail::await_all(futures, "map");
    files += blocks.size() * reducers;

    for (std::uint32_t r = 0; r < reducers; ++r) {
      auto body = [&, r](fabric::TaskContext& ctx) {
        fabric::PhaseTimer timer(metrics, Phase::reduce);
        auto part = kernel::PartialSums::zero(k, d);
        std::vector<double> coords(d);
        for (std::size_t m = 0; m < blocks.size(); ++m) {
          const Bytes file = store.read_object(ctx.node(), exchange_file(m, r));
          metrics.add(Counter::shuffle_bytes, file.size());
          if (file.size() % record_bytes != 0) fail(ErrorKind::io, "torn exchange file");
          for (std::size_t at = 0; at < file.size(); at += record_bytes) {
            const auto key = record_key(file.data() + at);
            if (key >= k) fail(ErrorKind::io, "exchange record key out of range");
            std::memcpy(coords.data(), file.data() + at + 4, 8 * d);
            kernel::accumulate(part, coords, key);
          }
        }
        store.write(ctx.node(), reduce_file(r), detail::encode_sparse(part));
      };
      futures.push_back(pilot->submit_cu(
          fabric::TaskSpec{0, fabric::TaskKind::compute_unit, {}, "reduce-" + std::to_string(r)},
          std::move(body)));
    }
    detail::await_all(futures, "reduce");

    kernel::CentroidSet next;
    {
      fabric::PhaseTimer timer(metrics, Phase::persist);
      auto total = kernel::PartialSums::zero(k, d);
      for (std::uint32_t r = 0; r < reducers; ++r) {
        detail::scatter_sparse(store.read_object(kDriverNode, reduce_file(r)), total);
      }
      next = kernel::finalize(total, current);
      store.write(kDriverNode, kCentroidObject, kernel::to_bytes(next));
    }
    const bool done = kernel::converged(current, next, job.epsilon);
    result.trajectory.push_back(next);
    result.iterations = iter;
    current = std::move(next);
    frame.clock().mark(iter);
    if (done) {
      result.converged = true;
      break;
    }
  }
  pilot->shutdown();
  result.final_centroids = current;
  auto run = frame.finish(std::move(result));
  run.intermediate_files = files;
  return run;
}

}  // namespace ogre::engines
