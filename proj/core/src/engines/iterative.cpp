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

// Iterative collective engine: long-running containers acquired once, data
// cached as immutable partitions, and centroid aggregation by allreduce.
// Every iteration derives two new partitions (assignments, then per-key
// sums) instead of updating anything in place.

#include <algorithm>
#include <atomic>
#include <memory>

#include "common.hpp"
#include "ogre/blocking_queue.hpp"
#include "ogre/engines/records.hpp"
#include "ogre/error.hpp"

namespace ogre::engines {
namespace {

using fabric::Counter;
using fabric::NodeId;
using fabric::Phase;

// Live partition count of one worker; the metrics keep the run-wide peak.
class Generations {
 public:
  explicit Generations(fabric::Metrics& metrics) : metrics_(metrics) {}
  void hold() { metrics_.observe_generations(++live_); }
  void drop(std::uint64_t n) { live_ -= n; }

 private:
  fabric::Metrics& metrics_;
  std::uint64_t live_ = 0;
};

InMemoryPartition derive_assignments(const InMemoryPartition& base, const Records& centroids,
                                     std::uint64_t iteration, bool fault) {
  Records out;
  out.reserve(base.size());
  for (const auto& p : base.records()) {
    const auto key = detail::apply_fault(nearest(p, centroids), iteration, p.key,
                                         centroids.size(), fault);
    out.push_back(Record{static_cast<std::uint32_t>(key), p.value});
  }
  return InMemoryPartition(base.generation() + 1, std::move(out));
}

// One record per centroid with members: value = d sums followed by the count.
InMemoryPartition derive_sums(const InMemoryPartition& assigned, std::size_t k, std::size_t d) {
  auto acc = kernel::PartialSums::zero(k, d);
  for (const auto& r : assigned.records()) kernel::accumulate(acc, r.value, r.key);
  Records out;
  for (std::size_t c = 0; c < k; ++c) {
    if (acc.counts[c] == 0) continue;
    Record rec{static_cast<std::uint32_t>(c), std::vector<double>(acc.sum(c).begin(), acc.sum(c).end())};
    rec.value.push_back(static_cast<double>(acc.counts[c]));
    out.push_back(std::move(rec));
  }
  return InMemoryPartition(assigned.generation() + 1, std::move(out));
}

kernel::PartialSums to_partial_sums(const InMemoryPartition& sums, std::size_t k, std::size_t d) {
  auto out = kernel::PartialSums::zero(k, d);
  for (const auto& r : sums.records()) {
    std::copy_n(r.value.begin(), d, out.sums.begin() + static_cast<std::ptrdiff_t>(r.key * d));
    out.counts[r.key] = static_cast<std::uint64_t>(r.value[d]);
  }
  return out;
}

// Blocks go to a worker on a replica holder, fewest blocks first.
std::vector<std::vector<std::uint32_t>> assign_blocks(const store::BlockMap& blocks,
                                                      const std::vector<NodeId>& worker_nodes,
                                                      const store::BlockStore& store) {
  std::vector<std::vector<std::uint32_t>> out(worker_nodes.size());
  for (const auto& b : blocks) {
    const auto holders = store.locate(b.id);
    std::size_t best = worker_nodes.size();
    for (int pass = 0; pass < 2 && best == worker_nodes.size(); ++pass) {
      for (std::size_t w = 0; w < worker_nodes.size(); ++w) {
        const bool local = std::find(holders.begin(), holders.end(), worker_nodes[w]) != holders.end();
        if (pass == 0 && !local) continue;
        if (best == worker_nodes.size() || out[w].size() < out[best].size()) best = w;
      }
    }
    out[best].push_back(b.id);
  }
  return out;
}

}  // namespace

EngineRun run_iterative_collective(Testbed& tb, const KMeansJob& job, const EngineOptions& opt) {
  detail::RunFrame frame(tb, EngineKind::iterative_collective, opt, job);
  auto& cluster = tb.cluster();
  auto& metrics = cluster.metrics();
  auto& store = tb.store();
  auto& rm = tb.resource_manager();
  const auto blocks = store.block_map();
  const std::size_t k = job.initial.k();
  const std::size_t d = job.initial.dims();

  auto grants = std::make_shared<BlockingQueue<sched::Container>>();
  const auto session = rm.register_app_master(
      "iterative", sched::AppMasterCallbacks{[grants](const sched::Container& c) { grants->push(c); },
                                             {}});
  struct Deregister {
    sched::ResourceManager& rm;
    sched::SessionId s;
    ~Deregister() { rm.deregister(s); }
  } deregister{rm, session};

  const std::uint32_t workers = cluster.total_slots();
  rm.request_containers(session, sched::ResourceRequest{workers, 1, 0, {}});
  std::vector<sched::Container> containers;
  while (containers.size() < workers) containers.push_back(grants->pop());
  std::sort(containers.begin(), containers.end(), [](const auto& a, const auto& b) {
    return a.node != b.node ? a.node < b.node : a.id < b.id;
  });
  std::vector<NodeId> nodes;
  collectives::CollectiveGroup group;
  for (std::size_t w = 0; w < containers.size(); ++w) {
    rm.mark_running(session, containers[w].id);
    nodes.push_back(containers[w].node);
    group.members.push_back(
        fabric::Endpoint{containers[w].node, detail::kWorkerPortBase + static_cast<std::uint32_t>(w)});
  }
  const auto owned = assign_blocks(blocks, nodes, store);
  const collectives::Options copts{opt.collective, opt.deterministic, opt.compress};
  const fabric::Endpoint driver{detail::kDriverNode, detail::kDriverPort};
  constexpr std::uint64_t kTrajectoryTag = 1;

  std::vector<std::future<fabric::TaskResult>> futures;
  for (std::size_t w = 0; w < workers; ++w) {
    auto body = [&, w](fabric::TaskContext& ctx) {
      try {
        collectives::Communicator comm(cluster, group, w, copts);
        Generations gens(metrics);
        InMemoryPartition base;
        {
          fabric::PhaseTimer timer(metrics, Phase::load);
          Records loaded;
          for (auto id : owned[w]) {
            const auto read = store.read(ctx.node(), id);
            auto recs = to_records(dataset::decode_values(read.bytes), d, blocks[id].range.begin);
            std::move(recs.begin(), recs.end(), std::back_inserter(loaded));
          }
          base = InMemoryPartition(0, std::move(loaded));
          gens.hold();
        }
        comm.barrier();
        if (w == 0) frame.clock().start();

        kernel::KMeansResult result;
        result.trajectory.push_back(job.initial);
        kernel::CentroidSet current = job.initial;
        for (std::uint64_t iter = 1; iter <= job.max_iter; ++iter) {
          kernel::PartialSums local;
          {
            fabric::PhaseTimer timer(metrics, Phase::compute);
            const Records centroids = to_records(current);
            const auto assigned = derive_assignments(base, centroids, iter, opt.inject_assignment_fault);
            gens.hold();
            const auto sums = derive_sums(assigned, k, d);
            gens.hold();
            local = to_partial_sums(sums, k, d);
          }
          gens.drop(2);
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
          if (w == 0) frame.clock().mark(iter);
          if (done) {
            result.converged = true;
            break;
          }
        }
        if (w == 0) {
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
        fabric::TaskSpec{0, fabric::TaskKind::long_running_worker, containers[w].node,
                         "worker-" + std::to_string(w)},
        std::move(body)));
  }
  detail::await_all(futures, "worker");
  const auto msg = cluster.recv(driver, group.members[0], kTrajectoryTag);
  for (const auto& c : containers) rm.release(session, c.id);
  return frame.finish(detail::decode_trajectory(msg.payload));
}

}  // namespace ogre::engines
