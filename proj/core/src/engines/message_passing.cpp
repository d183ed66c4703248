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

// Message-passing engine: a gang of long-running ranks, a static contiguous
// share of blocks per rank held in one mutable flat buffer, and allreduce.

#include <algorithm>

#include "common.hpp"
#include "ogre/error.hpp"

namespace ogre::engines {

using fabric::NodeId;
using fabric::Phase;

EngineRun run_message_passing(Testbed& tb, const KMeansJob& job, const EngineOptions& opt) {
  detail::RunFrame frame(tb, EngineKind::message_passing, opt, job);
  auto& cluster = tb.cluster();
  auto& metrics = cluster.metrics();
  auto& store = tb.store();
  const auto blocks = store.block_map();
  const std::size_t k = job.initial.k();
  const std::size_t d = job.initial.dims();
  const auto& topo = cluster.topology();
  const std::uint32_t per_node = opt.ranks_per_node == 0 ? topo.cores_per_node : opt.ranks_per_node;
  if (per_node > topo.cores_per_node) {
    fail(ErrorKind::invalid_argument, "more ranks per node than cores");
  }

  const auto alloc = tb.centralized().submit(sched::JobRequest{"mpi-like", topo.node_count, {}, true});
  struct Release {
    sched::CentralizedScheduler& s;
    std::uint64_t id;
    ~Release() { s.release(id); }
  } release{tb.centralized(), alloc.job_id};

  const std::size_t p = alloc.nodes.size() * per_node;
  collectives::CollectiveGroup group;
  for (std::size_t r = 0; r < p; ++r) {
    group.members.push_back(
        fabric::Endpoint{alloc.nodes[r / per_node], detail::kWorkerPortBase + static_cast<std::uint32_t>(r)});
  }
  const collectives::Options copts{opt.collective, opt.deterministic, opt.compress};
  const fabric::Endpoint driver{detail::kDriverNode, detail::kDriverPort};
  constexpr std::uint64_t kTrajectoryTag = 1;

  std::vector<std::future<fabric::TaskResult>> futures;
  for (std::size_t r = 0; r < p; ++r) {
    // Contiguous block range, so rank order is point order.
    const std::size_t first_block = r * blocks.size() / p;
    const std::size_t last_block = (r + 1) * blocks.size() / p;
    auto body = [&, r, first_block, last_block](fabric::TaskContext& ctx) {
      try {
        collectives::Communicator comm(cluster, group, r, copts);
        std::vector<double> buffer;
        std::uint64_t first_point = 0;
        {
          fabric::PhaseTimer timer(metrics, Phase::load);
          for (std::size_t b = first_block; b < last_block; ++b) {
            if (b == first_block) first_point = blocks[b].range.begin;
            const auto read = store.read(ctx.node(), blocks[b].id);
            const auto values = dataset::decode_values(read.bytes);
            buffer.insert(buffer.end(), values.begin(), values.end());
          }
          metrics.observe_generations(1);
        }
        const kernel::PointView points(buffer, d);
        comm.barrier();
        if (r == 0) frame.clock().start();

        kernel::KMeansResult result;
        result.trajectory.push_back(job.initial);
        kernel::CentroidSet current = job.initial;
        auto local = kernel::PartialSums::zero(k, d);
        for (std::uint64_t iter = 1; iter <= job.max_iter; ++iter) {
          {
            fabric::PhaseTimer timer(metrics, Phase::compute);
            std::fill(local.sums.begin(), local.sums.end(), 0.0);
            std::fill(local.counts.begin(), local.counts.end(), 0);
            for (std::size_t i = 0; i < points.size(); ++i) {
              const auto c = detail::apply_fault(kernel::assign(points[i], current), iter,
                                                 first_point + i, k, opt.inject_assignment_fault);
              kernel::accumulate(local, points[i], c);
            }
          }
          kernel::PartialSums global;
          {
            fabric::PhaseTimer timer(metrics, Phase::collective);
            global = comm.allreduce(local);
          }
          auto next = kernel::finalize(global, current);
          const bool done = kernel::converged(current, next, job.epsilon);
          result.trajectory.push_back(next);
          result.iterations = iter;
          current = std::move(next);
          if (r == 0) frame.clock().mark(iter);
          if (done) {
            result.converged = true;
            break;
          }
        }
        if (r == 0) {
          result.final_centroids = current;
          cluster.send(group.members[0], driver, kTrajectoryTag, fabric::Channel::control,
                       detail::encode_trajectory(result));
        }
      } catch (const std::exception& e) {
        cluster.abort(e.what());
        throw;
      }
    };
    futures.push_back(cluster.run_task(
        fabric::TaskSpec{0, fabric::TaskKind::long_running_worker, group.members[r].node,
                         "rank-" + std::to_string(r)},
        std::move(body)));
  }
  detail::await_all(futures, "rank");
  const auto msg = cluster.recv(driver, group.members[0], kTrajectoryTag);
  return frame.finish(detail::decode_trajectory(msg.payload));
}

}  // namespace ogre::engines
