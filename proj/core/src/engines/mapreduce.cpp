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

// MapReduce: one scheduler job per iteration, sort-based shuffle with spills,
// and centroids persisted to the store between jobs.

#include <algorithm>
#include <cstring>
#include <memory>
#include <thread>

#include "common.hpp"
#include "ogre/blocking_queue.hpp"
#include "ogre/engines/records.hpp"
#include "ogre/engines/shuffle.hpp"
#include "ogre/error.hpp"
#include "ogre/kernel/wire.hpp"

namespace ogre::engines {
namespace {

using detail::kDriverNode;
using fabric::Counter;
using fabric::NodeId;
using fabric::Phase;

constexpr const char* kCentroidObject = "mapreduce/centroids";

struct TaskUnit {
  fabric::TaskSpec spec;
  std::vector<NodeId> preferred;  // replica holders of the task's input
  fabric::TaskBody body;
};

// The resources of one MapReduce job, obtained from one of the schedulers.
class Job {
 public:
  virtual ~Job() = default;
  virtual std::vector<std::future<fabric::TaskResult>> launch(std::vector<TaskUnit> tasks) = 0;
};

NodeId least_loaded(const fabric::Cluster& cluster, const std::vector<NodeId>& among) {
  NodeId best = among.front();
  std::size_t best_len = cluster.queue_length(best);
  for (NodeId n : among) {
    const auto len = cluster.queue_length(n);
    if (len < best_len || (len == best_len && n < best)) {
      best = n;
      best_len = len;
    }
  }
  return best;
}

// Gang of every node; tasks go to the least-loaded replica holder.
class CentralizedJob final : public Job {
 public:
  CentralizedJob(Testbed& tb, const std::string& name) : tb_(tb) {
    alloc_ = tb.centralized().submit(
        sched::JobRequest{name, tb.config().topology.node_count, {}, true});
  }
  ~CentralizedJob() override { tb_.centralized().release(alloc_.job_id); }

  std::vector<std::future<fabric::TaskResult>> launch(std::vector<TaskUnit> tasks) override {
    std::vector<std::future<fabric::TaskResult>> out;
    for (auto& t : tasks) {
      std::vector<NodeId> local;
      for (NodeId n : t.preferred) {
        if (std::find(alloc_.nodes.begin(), alloc_.nodes.end(), n) != alloc_.nodes.end()) {
          local.push_back(n);
        }
      }
      t.spec.target = least_loaded(tb_.cluster(), local.empty() ? alloc_.nodes : local);
      out.push_back(tb_.cluster().run_task(std::move(t.spec), std::move(t.body)));
    }
    return out;
  }

 private:
  Testbed& tb_;
  sched::JobAllocation alloc_;
};

// Per-job application master. Containers are matched to tasks as they are
// granted, preferring a task whose input is on the container's node.
class MultilevelJob final : public Job {
 public:
  MultilevelJob(Testbed& tb, const std::string& name)
      : tb_(tb), grants_(std::make_shared<BlockingQueue<sched::Container>>()) {
    auto grants = grants_;
    session_ = tb.resource_manager().register_app_master(
        name, sched::AppMasterCallbacks{[grants](const sched::Container& c) { grants->push(c); },
                                        {}});
  }
  ~MultilevelJob() override { tb_.resource_manager().deregister(session_); }

  std::vector<std::future<fabric::TaskResult>> launch(std::vector<TaskUnit> tasks) override {
    auto& rm = tb_.resource_manager();
    for (const auto& t : tasks) rm.request_containers(session_, sched::ResourceRequest{1, 1, 0, t.preferred});

    std::vector<std::future<fabric::TaskResult>> out(tasks.size());
    std::vector<bool> started(tasks.size(), false);
    for (std::size_t launched = 0; launched < tasks.size(); ++launched) {
      const sched::Container c = grants_->pop();
      std::size_t pick = tasks.size();
      for (std::size_t i = 0; i < tasks.size() && pick == tasks.size(); ++i) {
        if (!started[i] && std::find(tasks[i].preferred.begin(), tasks[i].preferred.end(),
                                     c.node) != tasks[i].preferred.end()) {
          pick = i;
        }
      }
      if (pick == tasks.size()) {
        pick = static_cast<std::size_t>(std::find(started.begin(), started.end(), false) -
                                        started.begin());
      }
      started[pick] = true;
      rm.mark_running(session_, c.id);
      auto& t = tasks[pick];
      t.spec.target = c.node;
      auto body = [&rm, session = session_, id = c.id,
                   inner = std::move(t.body)](fabric::TaskContext& ctx) {
        try {
          inner(ctx);
        } catch (...) {
          rm.release(session, id);
          throw;
        }
        rm.release(session, id);
      };
      out[pick] = tb_.cluster().run_task(std::move(t.spec), std::move(body));
    }
    return out;
  }

 private:
  Testbed& tb_;
  std::shared_ptr<BlockingQueue<sched::Container>> grants_;
  sched::SessionId session_ = 0;
};

// Sampling placement; the scheduler keeps no job state, so the engine
// counts the submission itself.
class DecentralJob final : public Job {
 public:
  explicit DecentralJob(Testbed& tb) : tb_(tb) {
    tb.cluster().metrics().add(Counter::jobs_launched);
  }

  std::vector<std::future<fabric::TaskResult>> launch(std::vector<TaskUnit> tasks) override {
    std::vector<std::future<fabric::TaskResult>> out;
    for (auto& t : tasks) {
      const auto queues = tb_.cluster().queue_lengths();
      t.spec.target = tb_.decentral().place(queues);
      out.push_back(tb_.cluster().run_task(std::move(t.spec), std::move(t.body)));
    }
    return out;
  }

 private:
  Testbed& tb_;
};

std::unique_ptr<Job> open_job(Testbed& tb, sched::SchedulerKind kind, const std::string& name) {
  switch (kind) {
    case sched::SchedulerKind::centralized:
      return std::make_unique<CentralizedJob>(tb, name);
    case sched::SchedulerKind::multilevel:
      return std::make_unique<MultilevelJob>(tb, name);
    case sched::SchedulerKind::decentral:
      return std::make_unique<DecentralJob>(tb);
  }
  fail(ErrorKind::invalid_argument, "unknown scheduler");
}

// Sorted map output, one segment per reducer, left on the map's node until
// fetched.
struct MapOutput {
  NodeId node = 0;
  std::vector<Bytes> segments;
};

std::string part_name(std::uint32_t reducer) {
  return "mapreduce/part-r-" + std::to_string(reducer);
}

}  // namespace

EngineRun run_mapreduce(Testbed& tb, const KMeansJob& job, const EngineOptions& opt) {
  detail::RunFrame frame(tb, EngineKind::mapreduce, opt, job);
  auto& cluster = tb.cluster();
  auto& metrics = cluster.metrics();
  auto& store = tb.store();
  const auto blocks = store.block_map();
  const std::size_t k = job.initial.k();
  const std::size_t d = job.initial.dims();
  const std::uint32_t reducers = detail::reducer_count(opt, cluster.topology());
  const std::size_t record_bytes = opt.combine ? combined_record_bytes(d) : shuffle_record_bytes(d);
  ScratchDir scratch(opt.workdir.empty() ? default_workdir() : opt.workdir);

  store.write(kDriverNode, kCentroidObject, kernel::to_bytes(job.initial));
  frame.clock().start();

  kernel::KMeansResult result;
  result.trajectory.push_back(job.initial);
  kernel::CentroidSet current = job.initial;

  for (std::uint64_t iter = 1; iter <= job.max_iter; ++iter) {
    auto handle = open_job(tb, opt.scheduler, "mapreduce-" + std::to_string(iter));
    if (opt.job_launch.count() > 0) {
      fabric::PhaseTimer t(metrics, Phase::job_launch);
      std::this_thread::sleep_for(opt.job_launch);
    }

    std::vector<MapOutput> outputs(blocks.size());
    std::vector<TaskUnit> maps;
    for (std::size_t m = 0; m < blocks.size(); ++m) {
      const auto block = blocks[m];
      auto body = [&, m, block, iter](fabric::TaskContext& ctx) {
        fabric::PhaseTimer timer(metrics, Phase::map);
        const NodeId node = ctx.node();
        const auto centroids = to_records(
            kernel::centroids_from_bytes(store.read_object(node, kCentroidObject)));
        const auto input = store.read(node, block.id);
        const auto points = to_records(dataset::decode_values(input.bytes), d, block.range.begin);

        MapOutputBuffer buffer(record_bytes, reducers, opt.spill_threshold_bytes, scratch, metrics);
        if (!opt.combine) {
          for (const auto& p : points) {
            const auto key = detail::apply_fault(nearest(p, centroids), iter, p.key, k,
                                                 opt.inject_assignment_fault);
            buffer.emit(static_cast<std::uint32_t>(key), std::as_bytes(std::span(p.value)));
          }
        } else {
          auto local = kernel::PartialSums::zero(k, d);
          for (const auto& p : points) {
            const auto key = detail::apply_fault(nearest(p, centroids), iter, p.key, k,
                                                 opt.inject_assignment_fault);
            kernel::accumulate(local, p.value, key);
          }
          std::vector<std::byte> payload(record_bytes - 4);
          for (std::size_t c = 0; c < k; ++c) {
            if (local.counts[c] == 0) continue;
            std::memcpy(payload.data(), local.sum(c).data(), 8 * d);
            std::memcpy(payload.data() + 8 * d, &local.counts[c], 8);
            buffer.emit(static_cast<std::uint32_t>(c), payload);
          }
        }
        metrics.add(Counter::map_output_bytes, buffer.records() * record_bytes);
        outputs[m] = MapOutput{node, buffer.finish()};
      };
      maps.push_back(TaskUnit{fabric::TaskSpec{0, fabric::TaskKind::map, {}, "map-" + std::to_string(m)},
                              store.locate(block.id), std::move(body)});
    }
    auto map_futures = handle->launch(std::move(maps));
    detail::await_all(map_futures, "map");

    std::vector<TaskUnit> reduces;
    for (std::uint32_t r = 0; r < reducers; ++r) {
      auto body = [&, r, iter](fabric::TaskContext& ctx) {
        const fabric::Endpoint self{ctx.node(), detail::kReducerPortBase + r};
        ReduceMerger merger(record_bytes, opt.spill_threshold_bytes, scratch, metrics);
        {
          fabric::PhaseTimer timer(metrics, Phase::shuffle);
          for (std::size_t m = 0; m < outputs.size(); ++m) {
            const Bytes& segment = outputs[m].segments[r];
            if (segment.empty()) continue;
            const std::uint64_t tag = (iter << 40) | (std::uint64_t{m} << 16) | r;
            cluster.send(fabric::Endpoint{outputs[m].node, detail::kMapOutputPort}, self, tag,
                         fabric::Channel::shuffle, segment);
            auto msg = cluster.recv(self, std::nullopt, tag);
            metrics.add(Counter::shuffle_bytes, msg.payload.size());
            merger.add(std::move(msg.payload));
          }
        }
        fabric::PhaseTimer timer(metrics, Phase::reduce);
        auto part = kernel::PartialSums::zero(k, d);
        std::vector<double> coords(d);
        merger.for_each([&](const std::byte* rec) {
          const auto key = record_key(rec);
          std::memcpy(coords.data(), rec + 4, 8 * d);
          if (opt.combine) {
            std::uint64_t count;
            std::memcpy(&count, rec + 4 + 8 * d, 8);
            for (std::size_t j = 0; j < d; ++j) part.sums[key * d + j] += coords[j];
            part.counts[key] += count;
          } else {
            kernel::accumulate(part, coords, key);
          }
        });
        store.write(ctx.node(), part_name(r), detail::encode_sparse(part));
      };
      reduces.push_back(TaskUnit{
          fabric::TaskSpec{0, fabric::TaskKind::reduce, {}, "reduce-" + std::to_string(r)}, {},
          std::move(body)});
    }
    auto reduce_futures = handle->launch(std::move(reduces));
    detail::await_all(reduce_futures, "reduce");
    handle.reset();

    kernel::CentroidSet next;
    {
      fabric::PhaseTimer timer(metrics, Phase::persist);
      auto total = kernel::PartialSums::zero(k, d);
      for (std::uint32_t r = 0; r < reducers; ++r) {
        detail::scatter_sparse(store.read_object(kDriverNode, part_name(r)), total);
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
  result.final_centroids = current;
  return frame.finish(std::move(result));
}

}  // namespace ogre::engines
