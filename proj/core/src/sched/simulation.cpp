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

#include "ogre/sched/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>

#include "ogre/error.hpp"
#include "ogre/sched/centralized.hpp"
#include "ogre/sched/multilevel.hpp"

namespace ogre::sched {
namespace {

struct Event {
  double time;
  std::uint64_t seq;
  std::function<void()> fire;
  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

class Clock {
 public:
  void at(double t, std::function<void()> fire) { q_.push(Event{t, seq_++, std::move(fire)}); }
  double now() const noexcept { return now_; }
  void run() {
    while (!q_.empty()) {
      Event e = q_.top();
      q_.pop();
      now_ = e.time;
      e.fire();
    }
  }

 private:
  std::priority_queue<Event, std::vector<Event>, std::greater<>> q_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
};

struct Tally {
  explicit Tally(std::uint32_t slots) : slots(slots) {}
  void occupy(std::uint32_t n) {
    busy += n;
    if (busy > slots) fail(ErrorKind::scheduler, "slot capacity exceeded");
    peak = std::max(peak, busy);
  }
  void vacate(std::uint32_t n) { busy -= n; }
  std::uint32_t slots;
  std::uint32_t busy = 0;
  std::uint32_t peak = 0;
  double busy_seconds = 0.0;
};

struct Run {
  double makespan = 0.0;
  double busy_seconds = 0.0;
  std::uint32_t peak = 0;
  std::uint64_t submissions = 0;
  std::vector<double> completion;
};

Run run_centralized(const fabric::ClusterTopology& topo, const std::vector<SimApp>& apps) {
  CentralizedScheduler sched(topo.node_count);
  Clock clock;
  Tally tally(topo.total_slots());
  Run out;
  out.completion.assign(apps.size(), 0.0);
  std::map<std::uint64_t, std::pair<std::size_t, std::uint32_t>> jobs;  // job -> (app, tasks)

  std::function<void(const std::vector<JobAllocation>&)> start;
  start = [&](const std::vector<JobAllocation>& grants) {
    for (const auto& g : grants) {
      const auto [app, tasks] = jobs.at(g.job_id);
      const auto& a = apps[app];
      // Whole nodes are held for the job; its tasks run in waves over the cores.
      const std::uint32_t held = static_cast<std::uint32_t>(g.nodes.size()) * topo.cores_per_node;
      const double waves = std::ceil(static_cast<double>(tasks) / held);
      const double duration = waves * a.task_seconds;
      const std::uint32_t used = std::min(tasks, held);
      tally.occupy(used);
      tally.busy_seconds += tasks * a.task_seconds;
      clock.at(clock.now() + duration, [&, id = g.job_id, app, used] {
        tally.vacate(used);
        out.completion[app] = std::max(out.completion[app], clock.now());
        start(sched.release(id));
      });
    }
  };

  for (std::size_t i = 0; i < apps.size(); ++i) {
    const auto& a = apps[i];
    if (a.gang) {
      jobs[sched.enqueue(JobRequest{a.name, a.nodes, {}, true})] = {i, a.tasks};
    } else {
      for (std::uint32_t t = 0; t < a.tasks; ++t) {
        jobs[sched.enqueue(JobRequest{a.name, 1, {}, false})] = {i, 1};
      }
    }
  }
  start(sched.dispatch());
  clock.run();
  out.makespan = clock.now();
  out.busy_seconds = tally.busy_seconds;
  out.peak = tally.peak;
  out.submissions = sched.submissions();
  return out;
}

Run run_multilevel(const fabric::ClusterTopology& topo, const std::vector<SimApp>& apps) {
  ResourceManagerCore rm(topo);
  Clock clock;
  Tally tally(topo.total_slots());
  Run out;
  out.completion.assign(apps.size(), 0.0);
  std::map<SessionId, std::size_t> app_of;

  std::function<void(const std::vector<RmEvent>&)> handle;
  handle = [&](const std::vector<RmEvent>& events) {
    for (const auto& ev : events) {
      if (ev.kind != RmEvent::Kind::granted) continue;
      const auto c = ev.container;
      const std::size_t app = app_of.at(c.session);
      rm.mark_running(c.session, c.id);
      tally.occupy(c.cores);
      tally.busy_seconds += apps[app].task_seconds;
      clock.at(clock.now() + apps[app].task_seconds, [&, c, app] {
        tally.vacate(c.cores);
        out.completion[app] = std::max(out.completion[app], clock.now());
        handle(rm.release(c.session, c.id));
      });
    }
  };

  for (std::size_t i = 0; i < apps.size(); ++i) {
    const auto s = rm.register_app(apps[i].name);
    app_of[s] = i;
    rm.request(s, ResourceRequest{apps[i].tasks, 1, 0, {}});
  }
  out.submissions = apps.size();
  handle(rm.schedule());
  clock.run();
  out.makespan = clock.now();
  out.busy_seconds = tally.busy_seconds;
  out.peak = tally.peak;
  return out;
}

Run run(const fabric::ClusterTopology& topo, const std::vector<SimApp>& apps,
        SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::centralized:
      return run_centralized(topo, apps);
    case SchedulerKind::multilevel:
      return run_multilevel(topo, apps);
    case SchedulerKind::decentral:
      break;
  }
  fail(ErrorKind::invalid_argument, "simulation supports centralized and multilevel only");
}

}  // namespace

std::vector<SimApp> mixed_workload() {
  return {SimApp{"gang", 60, 1.0, true, 4}, SimApp{"singles", 64, 1.0, false, 1}};
}

double jain_index(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0, sq = 0.0;
  for (double v : values) {
    sum += v;
    sq += v * v;
  }
  return sq == 0.0 ? 0.0 : (sum * sum) / (static_cast<double>(values.size()) * sq);
}

UtilizationReport simulate(const fabric::ClusterTopology& topology,
                           const std::vector<SimApp>& workload, SchedulerKind scheduler) {
  topology.validate();
  if (workload.empty()) fail(ErrorKind::invalid_argument, "empty workload");
  for (const auto& a : workload) {
    if (a.tasks == 0 || !(a.task_seconds > 0.0)) {
      fail(ErrorKind::invalid_argument, "workload app needs tasks and positive duration");
    }
  }
  const Run r = run(topology, workload, scheduler);

  UtilizationReport rep;
  rep.scheduler = scheduler;
  rep.makespan_seconds = r.makespan;
  rep.busy_slot_seconds = r.busy_seconds;
  rep.capacity_slot_seconds = r.makespan * topology.total_slots();
  rep.utilization = rep.capacity_slot_seconds > 0 ? r.busy_seconds / rep.capacity_slot_seconds : 0;
  rep.peak_busy_slots = r.peak;
  rep.submissions = r.submissions;
  std::vector<double> shares;
  for (std::size_t i = 0; i < workload.size(); ++i) {
    const Run alone = run(topology, {workload[i]}, scheduler);
    rep.apps.push_back(AppOutcome{workload[i].name, r.completion[i], alone.makespan});
    shares.push_back(alone.makespan / r.completion[i]);
  }
  rep.fairness = jain_index(shares);
  return rep;
}

}  // namespace ogre::sched
