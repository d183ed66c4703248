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

// Acceptance gate: runs each criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exits nonzero when any criterion fails.

#include <algorithm>
#include <bit>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ogre/bench/compare.hpp"
#include "ogre/bench/run.hpp"
#include "ogre/collectives/collectives.hpp"
#include "ogre/fabric/cluster.hpp"
#include "ogre/kernel/kmeans.hpp"
#include "ogre/sched/centralized.hpp"
#include "ogre/sched/multilevel.hpp"
#include "ogre/sched/simulation.hpp"

namespace {

using namespace ogre;
using engines::EngineKind;
using fabric::Counter;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

fabric::ClusterTopology topo(std::uint32_t nodes, std::uint32_t cores) {
  fabric::ClusterTopology t;
  t.node_count = nodes;
  t.cores_per_node = cores;
  return t;
}

bench::RunConfig config(EngineKind engine, dataset::ScenarioSpec spec, std::string name = "custom") {
  return bench::RunConfig::for_engine(engine, bench::Scenario{std::move(name), spec});
}

bench::RunReport must_run(const bench::RunConfig& c) {
  auto r = bench::execute(c);
  if (!r.ok) throw std::runtime_error(std::string(engines::engine_name(c.engine)) + ": " + r.error);
  return r;
}

Outcome ac1_oracle() {
  std::ostringstream detail;
  bool pass = true;
  for (const char* name : {"i-tiny", "i-small"}) {
    bench::VerifyConfig v;
    v.scenario_name = name;
    v.scenario = bench::find_scenario(name)->spec;
    for (const auto& c : bench::verify(v)) {
      pass = pass && c.pass;
      detail << name << '/' << engines::engine_name(c.engine) << (c.pass ? " ok" : " FAILED");
      if (c.divergence) detail << " (iteration " << c.divergence->iteration << ')';
      if (!c.error.empty()) detail << " (" << c.error << ')';
      detail << "; ";
    }
  }
  return {pass, detail.str()};
}

Outcome ac2_ordering() {
  bench::CompareConfig c;
  c.scenarios = {"i-small", "ii-small"};
  c.engines = {EngineKind::message_passing, EngineKind::iterative_collective, EngineKind::mapreduce};
  c.base.topology = topo(4, 4);
  const auto result = bench::compare(c);
  bool pass = result.complete();
  std::string detail;
  for (const auto& s : c.scenarios) pass = pass && bench::ordering_holds(result, s, c.engines);
  for (const auto& v : result.verdicts) detail += v.line + "; ";
  return {pass, detail};
}

Outcome ac3_shuffle() {
  const std::vector<std::pair<std::uint64_t, std::uint32_t>> family{
      {10'000, 500}, {100'000, 50}, {1'000'000, 5}};
  std::vector<double> bytes;
  bool exact = true;
  std::string detail;
  for (auto [n, k] : family) {
    auto c = config(EngineKind::mapreduce, {n, k, 3, 42, 2, 1e-4});
    const auto r = must_run(c);
    const auto measured = r.per_iteration.front().delta[Counter::map_output_bytes];
    const auto formula = n * (4 + 8 * 3);
    exact = exact && measured == formula;
    bytes.push_back(static_cast<double>(measured));
    detail += fmt("n=%llu: %llu bytes (formula %llu); ", static_cast<unsigned long long>(n),
                  static_cast<unsigned long long>(measured), static_cast<unsigned long long>(formula));
  }
  const double r1 = bytes[1] / bytes[0];
  const double r2 = bytes[2] / bytes[0];
  const bool ratio = std::abs(r1 - 10) <= 0.1 && std::abs(r2 - 100) <= 1.0;
  detail += fmt("ratio 1:%.3f:%.3f", r1, r2);
  return {exact && ratio, detail};
}

Outcome ac4_utilization() {
  const auto central = sched::simulate(topo(4, 4), sched::mixed_workload(), sched::SchedulerKind::centralized);
  const auto multi = sched::simulate(topo(4, 4), sched::mixed_workload(), sched::SchedulerKind::multilevel);
  const double gain = multi.utilization - central.utilization;
  return {multi.utilization > central.utilization && gain >= 0.15,
          fmt("centralized %.4f, multilevel %.4f, gain %.4f", central.utilization,
              multi.utilization, gain)};
}

Outcome ac5_locality() {
  const auto spec = bench::find_scenario("i-tiny")->spec;
  auto c = config(EngineKind::mapreduce, spec, "i-tiny");
  c.scheduler = sched::SchedulerKind::multilevel;
  c.options.scheduler = c.scheduler;
  c.store_mode = store::StoreMode::colocated;
  c.replication = 3;
  const auto colocated = must_run(c);
  c.store_mode = store::StoreMode::shared;
  const auto shared = must_run(c);
  const auto hits = colocated.metrics[Counter::locality_hits];
  const auto misses = colocated.metrics[Counter::locality_misses];
  const double share = hits + misses == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(hits + misses);
  const auto shared_hits = shared.metrics[Counter::locality_hits];
  return {share >= 0.90 && shared_hits == 0,
          fmt("colocated %llu/%llu hits (%.1f%%), shared %llu hits",
              static_cast<unsigned long long>(hits), static_cast<unsigned long long>(hits + misses),
              100 * share, static_cast<unsigned long long>(shared_hits))};
}

Outcome ac6_persistence() {
  const auto spec = bench::find_scenario("i-tiny")->spec;
  bool pass = true;
  std::string detail;
  for (auto engine : engines::kAllEngines) {
    const auto r = must_run(config(engine, spec, "i-tiny"));
    const bool in_memory = engine == EngineKind::message_passing || engine == EngineKind::iterative_collective;
    bool ok = !r.per_iteration.empty();
    std::uint64_t min_read = ~0ull;
    std::uint64_t max_read = 0;
    for (const auto& it : r.per_iteration) {
      const auto read = it.delta[Counter::store_bytes_read];
      min_read = std::min(min_read, read);
      max_read = std::max(max_read, read);
    }
    ok = ok && (in_memory ? max_read == 0 : min_read > 0);
    if (engine == EngineKind::message_passing) ok = ok && r.metrics.peak_resident_generations == 1;
    if (engine == EngineKind::iterative_collective) ok = ok && r.metrics.peak_resident_generations == 3;
    pass = pass && ok;
    detail += fmt("%s reads/iter %llu..%llu peak gens %u; ",
                  std::string(engines::engine_name(engine)).c_str(),
                  static_cast<unsigned long long>(min_read), static_cast<unsigned long long>(max_read),
                  static_cast<unsigned>(r.metrics.peak_resident_generations));
  }
  return {pass, detail};
}

struct GroupRun {
  std::vector<kernel::PartialSums> results;
  std::uint64_t messages = 0;
};

GroupRun allreduce_group(std::size_t p, collectives::Algorithm algo,
                         const std::vector<kernel::PartialSums>& inputs) {
  fabric::Cluster cluster(topo(static_cast<std::uint32_t>(p), 1));
  collectives::CollectiveGroup group;
  for (std::size_t r = 0; r < p; ++r) {
    group.members.push_back({static_cast<fabric::NodeId>(r), static_cast<std::uint32_t>(100 + r)});
  }
  GroupRun out;
  out.results.resize(p);
  std::vector<std::exception_ptr> errors(p);
  {
    std::vector<std::jthread> threads;
    for (std::size_t r = 0; r < p; ++r) {
      threads.emplace_back([&, r] {
        try {
          collectives::Communicator comm(cluster, group, r, {algo, true, false});
          out.results[r] = comm.allreduce(inputs[r]);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  out.messages = cluster.snapshot_metrics()[Counter::collective_messages];
  return out;
}

Outcome ac7_collectives() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1000, 1000);
  bool pass = true;
  std::string detail;
  double worst = 0.0;
  for (std::size_t p : {2u, 4u, 8u}) {
    std::vector<kernel::PartialSums> inputs;
    for (std::size_t r = 0; r < p; ++r) {
      auto s = kernel::PartialSums::zero(16, 3);
      for (auto& v : s.sums) v = u(rng);
      for (auto& c : s.counts) c = rng() % 100;
      inputs.push_back(std::move(s));
    }
    auto fold = inputs[0];
    for (std::size_t r = 1; r < p; ++r) kernel::merge_into(fold, inputs[r]);
    const auto tree = allreduce_group(p, collectives::Algorithm::tree, inputs);
    const auto rd = allreduce_group(p, collectives::Algorithm::recursive_doubling, inputs);
    const auto log2p = static_cast<std::uint64_t>(std::countr_zero(p));
    pass = pass && tree.messages == 2 * (p - 1) && rd.messages == p * log2p;
    for (const auto* run : {&tree, &rd}) {
      for (const auto& res : run->results) {
        pass = pass && res.counts == fold.counts;
        for (std::size_t i = 0; i < fold.sums.size(); ++i) {
          worst = std::max(worst, kernel::relative_error(res.sums[i], fold.sums[i]));
        }
      }
    }
    detail += fmt("p=%zu tree %llu rdouble %llu; ", p, static_cast<unsigned long long>(tree.messages),
                  static_cast<unsigned long long>(rd.messages));
  }
  pass = pass && worst <= 1e-12;
  detail += fmt("max relative error %.3g", worst);
  return {pass, detail};
}

Outcome ac8_elastic() {
  sched::ResourceManagerCore rm(topo(4, 4));
  const auto app = rm.register_app("elastic");
  sched::ResourceRequest want;
  want.count = 24;
  rm.request(app, want);
  const auto first = rm.schedule();
  std::vector<sched::ContainerId> live;
  for (const auto& e : first) {
    if (e.kind == sched::RmEvent::Kind::granted) live.push_back(e.container.id);
  }
  const std::size_t initial = live.size();
  std::size_t total = initial;
  while (!live.empty()) {
    const auto cid = live.back();
    live.pop_back();
    for (const auto& e : rm.release(app, cid)) {
      if (e.kind != sched::RmEvent::Kind::granted) continue;
      ++total;
      live.push_back(e.container.id);
    }
  }

  std::mt19937_64 rng(2026);
  std::size_t partial_trials = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint32_t nodes = 1 + rng() % 8;
    sched::CentralizedScheduler s(nodes);
    std::set<sched::NodeId> busy;
    bool partial = false;
    s.set_grant_observer([&](const sched::JobRequest& j, const sched::JobAllocation& a) {
      if (a.nodes.size() != j.node_count) partial = true;
      for (auto n : a.nodes) {
        if (!busy.insert(n).second) partial = true;
      }
    });
    std::vector<sched::JobAllocation> running;
    for (int step = 0; step < 40; ++step) {
      if (rng() % 3 != 0 || running.empty()) {
        const bool gang = rng() % 4 != 0;
        const std::uint32_t want = gang ? 1 + rng() % nodes : 1;
        s.enqueue({"j", want, {}, gang});
        for (auto& a : s.dispatch()) running.push_back(a);
      } else {
        const auto pos = rng() % running.size();
        for (auto n : running[pos].nodes) busy.erase(n);
        const auto id = running[pos].job_id;
        running.erase(running.begin() + static_cast<long>(pos));
        for (auto& a : s.release(id)) running.push_back(a);
      }
    }
    partial_trials += partial ? 1 : 0;
  }
  return {initial <= 16 && total == 24 && partial_trials == 0,
          fmt("initial %zu, total %zu; partial gang trials %zu/1000", initial, total, partial_trials)};
}

Outcome ac9_compression() {
  auto c = config(EngineKind::iterative_collective, bench::find_scenario("i-tiny")->spec, "i-tiny");
  c.options.compress = false;
  const auto plain = must_run(c);
  c.options.compress = true;
  const auto packed = must_run(c);
  const auto a = plain.metrics[Counter::collective_bytes];
  const auto b = packed.metrics[Counter::collective_bytes];
  const bool same = plain.result.final_centroids == packed.result.final_centroids &&
                    plain.result.trajectory == packed.result.trajectory;
  return {b < a && same, fmt("collective bytes %llu -> %llu, centroids %s",
                             static_cast<unsigned long long>(a), static_cast<unsigned long long>(b),
                             same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC-1", ac1_oracle},      {"AC-2", ac2_ordering},    {"AC-3", ac3_shuffle},
      {"AC-4", ac4_utilization}, {"AC-5", ac5_locality},    {"AC-6", ac6_persistence},
      {"AC-7", ac7_collectives}, {"AC-8", ac8_elastic},     {"AC-9", ac9_compression},
  };
  // Optional arguments select criteria by name, e.g. `ogre_acceptance AC-3 AC-7`.
  const std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.contains(name)) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
