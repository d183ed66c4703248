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

#include "ogre/bench/run.hpp"

#include <zlib.h>

#include <chrono>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ogre/error.hpp"
#include "ogre/kernel/wire.hpp"

namespace ogre::bench {

using nlohmann::json;
using fabric::Counter;
using fabric::Phase;

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> registry = [] {
    auto make = [](const char* name, std::uint64_t n, std::uint64_t k) {
      dataset::ScenarioSpec s;
      s.n_points = n;
      s.k_clusters = k;
      return Scenario{name, s};
    };
    return std::vector<Scenario>{make("i-tiny", 10'000, 500), make("i-small", 100'000, 5'000),
                                 make("ii-small", 1'000'000, 500),
                                 make("iii-small", 10'000'000, 50)};
  }();
  return registry;
}

std::optional<Scenario> find_scenario(std::string_view name) {
  for (const auto& s : scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

std::string_view store_mode_name(store::StoreMode mode) noexcept {
  return mode == store::StoreMode::colocated ? "colocated" : "shared";
}

std::optional<store::StoreMode> parse_store_mode(std::string_view name) noexcept {
  if (name == "colocated") return store::StoreMode::colocated;
  if (name == "shared") return store::StoreMode::shared;
  return std::nullopt;
}

std::string_view algorithm_name(collectives::Algorithm a) noexcept {
  return a == collectives::Algorithm::tree ? "tree" : "rdouble";
}

std::optional<collectives::Algorithm> parse_algorithm(std::string_view name) noexcept {
  if (name == "tree") return collectives::Algorithm::tree;
  if (name == "rdouble") return collectives::Algorithm::recursive_doubling;
  return std::nullopt;
}

store::StoreMode default_store(engines::EngineKind engine) noexcept {
  return engine == engines::EngineKind::pilot_mapreduce ? store::StoreMode::shared
                                                        : store::StoreMode::colocated;
}

RunConfig RunConfig::for_engine(engines::EngineKind engine, const Scenario& scenario) {
  RunConfig c;
  c.scenario_name = scenario.name;
  c.scenario = scenario.spec;
  c.engine = engine;
  c.scheduler = engines::default_scheduler(engine);
  c.store_mode = default_store(engine);
  c.options.scheduler = c.scheduler;
  return c;
}

void RunConfig::validate() const {
  scenario.validate();
  topology.validate();
  engines::check_compatible(engine, scheduler);
  if (replication == 0) fail(ErrorKind::invalid_argument, "replication must be >= 1");
  if (options.spill_threshold_bytes == 0) {
    fail(ErrorKind::invalid_argument, "spill threshold must be positive");
  }
  if (options.ranks_per_node > topology.cores_per_node) {
    fail(ErrorKind::invalid_argument, "more ranks per node than cores");
  }
  if (options.job_launch.count() < 0 || options.cu_launch.count() < 0) {
    fail(ErrorKind::invalid_argument, "launch delays must be non-negative");
  }
}

std::uint32_t trajectory_crc(const kernel::KMeansResult& result) {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (const auto& c : result.trajectory) {
    const auto bytes = kernel::to_bytes(c);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  }
  return static_cast<std::uint32_t>(crc);
}

RunReport execute(const RunConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.config = config;
  rep.config.options.scheduler = config.scheduler;

  dataset::PointFile file;
  if (config.input.empty()) {
    file = dataset::generate(config.scenario);
  } else {
    file = dataset::PointFile::read(config.input);
    rep.config.scenario.n_points = file.size();
    rep.config.scenario.dims = file.dims();
    rep.config.scenario.validate();
  }
  engines::TestbedConfig tc;
  tc.topology = config.topology;
  tc.store.mode = config.store_mode;
  tc.store.replication = config.replication;
  tc.store.seed = config.scenario.seed;
  tc.store.inject_delay = config.topology.link.inject_delay;
  tc.seed = config.scenario.seed;
  engines::Testbed tb(tc);
  tb.ingest(file);
  rep.ingest_bytes = tb.cluster().snapshot_metrics()[Counter::store_ingest_bytes];
  const engines::KMeansJob job{
      dataset::init_centroids(file, config.scenario.k_clusters, config.scenario.seed),
      config.scenario.max_iter, config.scenario.epsilon};

  const auto before = tb.cluster().snapshot_metrics();
  try {
    auto run = engines::run_engine(config.engine, tb, job, rep.config.options);
    rep.ok = true;
    rep.iterations = run.result.iterations;
    rep.converged = run.result.converged;
    rep.trajectory_crc = trajectory_crc(run.result);
    rep.wall_seconds = run.wall_seconds;
    rep.metrics = run.metrics;
    rep.load = run.load;
    rep.intermediate_files = run.intermediate_files;
    for (const auto& it : run.iterations) {
      rep.per_iteration.push_back(IterationRow{it.iteration, it.seconds, it.delta});
    }
    rep.objective = kernel::objective(file.view(), run.result.final_centroids);
    rep.result = std::move(run.result);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_argument || e.kind() == ErrorKind::shape_mismatch) throw;
    rep.ok = false;
    rep.error = e.what();
    rep.metrics = tb.cluster().snapshot_metrics() - before;
  } catch (const std::exception& e) {
    rep.ok = false;
    rep.error = e.what();
    rep.metrics = tb.cluster().snapshot_metrics() - before;
  }
  rep.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

json metrics_json(const fabric::MetricsRecord& m) {
  json counters = json::object();
  for (std::size_t i = 0; i < fabric::kCounterCount; ++i) {
    counters[std::string(fabric::counter_name(static_cast<Counter>(i)))] = m.counters[i];
  }
  json phases = json::object();
  for (std::size_t i = 0; i < fabric::kPhaseCount; ++i) {
    phases[std::string(fabric::phase_name(static_cast<Phase>(i)))] =
        m.phase_seconds(static_cast<Phase>(i));
  }
  return json{{"counters", counters},
              {"phase_seconds", phases},
              {"peak_resident_generations", m.peak_resident_generations}};
}

fabric::MetricsRecord metrics_from_json(const json& j) {
  fabric::MetricsRecord m;
  const auto& counters = j.at("counters");
  for (std::size_t i = 0; i < fabric::kCounterCount; ++i) {
    m.counters[i] = counters.at(std::string(fabric::counter_name(static_cast<Counter>(i))))
                        .get<std::uint64_t>();
  }
  const auto& phases = j.at("phase_seconds");
  for (std::size_t i = 0; i < fabric::kPhaseCount; ++i) {
    const double s = phases.at(std::string(fabric::phase_name(static_cast<Phase>(i)))).get<double>();
    m.phase_ns[i] = static_cast<std::uint64_t>(s * 1e9 + 0.5);
  }
  m.peak_resident_generations = j.at("peak_resident_generations").get<std::uint64_t>();
  return m;
}

json config_json(const RunConfig& c) {
  const auto& o = c.options;
  return json{{"scenario", c.scenario_name},
              {"points", c.scenario.n_points},
              {"clusters", c.scenario.k_clusters},
              {"dims", c.scenario.dims},
              {"seed", c.scenario.seed},
              {"max_iter", c.scenario.max_iter},
              {"epsilon", c.scenario.epsilon},
              {"nodes", c.topology.node_count},
              {"cores", c.topology.cores_per_node},
              {"memory_per_node", c.topology.memory_per_node},
              {"link_latency_us", c.topology.link.latency_us},
              {"link_bandwidth", c.topology.link.bandwidth_bytes_per_s},
              {"inject_delay", c.topology.link.inject_delay},
              {"engine", engines::engine_name(c.engine)},
              {"scheduler", sched::scheduler_name(c.scheduler)},
              {"store", store_mode_name(c.store_mode)},
              {"replication", c.replication},
              {"collective", algorithm_name(o.collective)},
              {"deterministic", o.deterministic},
              {"compress", o.compress},
              {"combine", o.combine},
              {"reducers", o.reducers},
              {"spill_threshold_bytes", o.spill_threshold_bytes},
              {"job_launch_ms", o.job_launch.count()},
              {"cu_launch_us", o.cu_launch.count()},
              {"ranks_per_node", o.ranks_per_node}};
}

template <class T, class Parse>
T parse_enum(const json& j, const char* key, Parse parse) {
  const auto name = j.at(key).get<std::string>();
  const auto v = parse(name);
  if (!v) fail(ErrorKind::io, std::string("unknown ") + key + " '" + name + "' in report");
  return *v;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.scenario_name = j.at("scenario").get<std::string>();
  c.scenario.n_points = j.at("points").get<std::uint64_t>();
  c.scenario.k_clusters = j.at("clusters").get<std::uint64_t>();
  c.scenario.dims = j.at("dims").get<std::uint32_t>();
  c.scenario.seed = j.at("seed").get<std::uint64_t>();
  c.scenario.max_iter = j.at("max_iter").get<std::uint64_t>();
  c.scenario.epsilon = j.at("epsilon").get<double>();
  c.topology.node_count = j.at("nodes").get<std::uint32_t>();
  c.topology.cores_per_node = j.at("cores").get<std::uint32_t>();
  c.topology.memory_per_node = j.at("memory_per_node").get<std::uint64_t>();
  c.topology.link.latency_us = j.at("link_latency_us").get<double>();
  c.topology.link.bandwidth_bytes_per_s = j.at("link_bandwidth").get<double>();
  c.topology.link.inject_delay = j.at("inject_delay").get<bool>();
  c.engine = parse_enum<engines::EngineKind>(j, "engine", engines::parse_engine);
  c.scheduler = parse_enum<sched::SchedulerKind>(j, "scheduler", sched::parse_scheduler);
  c.store_mode = parse_enum<store::StoreMode>(j, "store", parse_store_mode);
  c.replication = j.at("replication").get<std::uint32_t>();
  auto& o = c.options;
  o.scheduler = c.scheduler;
  o.collective = parse_enum<collectives::Algorithm>(j, "collective", parse_algorithm);
  o.deterministic = j.at("deterministic").get<bool>();
  o.compress = j.at("compress").get<bool>();
  o.combine = j.at("combine").get<bool>();
  o.reducers = j.at("reducers").get<std::uint32_t>();
  o.spill_threshold_bytes = j.at("spill_threshold_bytes").get<std::uint64_t>();
  o.job_launch = std::chrono::milliseconds(j.at("job_launch_ms").get<std::int64_t>());
  o.cu_launch = std::chrono::microseconds(j.at("cu_launch_us").get<std::int64_t>());
  o.ranks_per_node = j.at("ranks_per_node").get<std::uint32_t>();
  return c;
}

json report_json(const RunReport& r) {
  json iters = json::array();
  for (const auto& it : r.per_iteration) {
    iters.push_back(json{{"iteration", it.iteration},
                         {"seconds", it.seconds},
                         {"metrics", metrics_json(it.delta)}});
  }
  return json{{"schema", kReportSchema},
              {"config", config_json(r.config)},
              {"status", r.ok ? "ok" : "failed"},
              {"error", r.error},
              {"result",
               {{"iterations", r.iterations},
                {"converged", r.converged},
                {"objective", r.objective},
                {"trajectory_crc32", r.trajectory_crc}}},
              {"wall_seconds", r.wall_seconds},
              {"total_seconds", r.total_seconds},
              {"ingest_bytes", r.ingest_bytes},
              {"intermediate_files", r.intermediate_files},
              {"metrics", metrics_json(r.metrics)},
              {"load", metrics_json(r.load)},
              {"per_iteration", iters}};
}

RunReport report_from(const json& j) {
  if (j.at("schema").get<std::string>() != kReportSchema) {
    fail(ErrorKind::io, "unsupported report schema " + j.at("schema").get<std::string>());
  }
  RunReport r;
  r.config = config_from_json(j.at("config"));
  r.ok = j.at("status").get<std::string>() == "ok";
  r.error = j.at("error").get<std::string>();
  const auto& res = j.at("result");
  r.iterations = res.at("iterations").get<std::uint64_t>();
  r.converged = res.at("converged").get<bool>();
  r.objective = res.at("objective").get<double>();
  r.trajectory_crc = res.at("trajectory_crc32").get<std::uint32_t>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.total_seconds = j.at("total_seconds").get<double>();
  r.ingest_bytes = j.at("ingest_bytes").get<std::uint64_t>();
  r.intermediate_files = j.at("intermediate_files").get<std::uint64_t>();
  r.metrics = metrics_from_json(j.at("metrics"));
  r.load = metrics_from_json(j.at("load"));
  for (const auto& it : j.at("per_iteration")) {
    r.per_iteration.push_back(IterationRow{it.at("iteration").get<std::uint64_t>(),
                                           it.at("seconds").get<double>(),
                                           metrics_from_json(it.at("metrics"))});
  }
  return r;
}

}  // namespace

std::string to_json(const RunReport& report, int indent) { return report_json(report).dump(indent); }

RunReport report_from_json(std::string_view text) {
  try {
    return report_from(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("malformed run report: ") + e.what());
  }
}

std::vector<std::string> schema_errors(std::string_view text) {
  std::vector<std::string> errors;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    return {std::string("not JSON: ") + e.what()};
  }
  try {
    (void)report_from(j);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  return errors;
}

std::string csv_header() {
  return "scenario,engine,scheduler,store,points,clusters,status,iterations,converged,"
         "wall_seconds,map_output_bytes,shuffle_bytes,spill_files,store_bytes_read,"
         "store_bytes_written,network_bytes,collective_bytes,jobs_launched,locality_hits,"
         "locality_misses,peak_resident_generations\n";
}

std::string csv_row(const RunReport& r) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  const auto& m = r.metrics;
  out << r.config.scenario_name << ',' << engines::engine_name(r.config.engine) << ','
      << sched::scheduler_name(r.config.scheduler) << ',' << store_mode_name(r.config.store_mode)
      << ',' << r.config.scenario.n_points << ',' << r.config.scenario.k_clusters << ','
      << (r.ok ? "ok" : "failed") << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
      << r.wall_seconds << ',' << m[Counter::map_output_bytes] << ',' << m[Counter::shuffle_bytes]
      << ',' << m[Counter::spill_files] << ',' << m[Counter::store_bytes_read] << ','
      << m[Counter::store_bytes_written] << ',' << m[Counter::network_bytes] << ','
      << m[Counter::collective_bytes] << ',' << m[Counter::jobs_launched] << ','
      << m[Counter::locality_hits] << ',' << m[Counter::locality_misses] << ','
      << m.peak_resident_generations << '\n';
  return out.str();
}

}  // namespace ogre::bench
