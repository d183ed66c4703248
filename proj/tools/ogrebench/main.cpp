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

// ogrebench: generate datasets, run one engine, compare engines, verify
// engines against the sequential oracle, and re-render saved reports.
//
// Exit codes: 0 success, 1 run failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ogre/bench/compare.hpp"
#include "ogre/bench/run.hpp"
#include "ogre/error.hpp"

namespace {

using namespace ogre;

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kUsage = 2;

const std::map<std::string, engines::EngineKind> kEngines = {
    {"mapreduce", engines::EngineKind::mapreduce},
    {"iterative", engines::EngineKind::iterative_collective},
    {"mpi-like", engines::EngineKind::message_passing},
    {"pilot", engines::EngineKind::pilot_mapreduce}};
const std::map<std::string, sched::SchedulerKind> kSchedulers = {
    {"centralized", sched::SchedulerKind::centralized},
    {"multilevel", sched::SchedulerKind::multilevel},
    {"decentral", sched::SchedulerKind::decentral}};
const std::map<std::string, store::StoreMode> kStores = {{"colocated", store::StoreMode::colocated},
                                                         {"shared", store::StoreMode::shared}};
const std::map<std::string, collectives::Algorithm> kAlgorithms = {
    {"tree", collectives::Algorithm::tree},
    {"rdouble", collectives::Algorithm::recursive_doubling}};
const std::map<std::string, bench::OutputFormat> kFormats = {{"json", bench::OutputFormat::json},
                                                             {"csv", bench::OutputFormat::csv}};

// Flags shared by generate, run, compare and verify. Unset optionals keep the
// scenario or engine defaults.
struct Common {
  std::string scenario;
  std::uint64_t points = 0;
  std::uint64_t clusters = 0;
  std::uint32_t dims = 3;
  std::uint64_t seed = 42;
  std::uint64_t max_iter = 10;
  double epsilon = 1e-4;
  std::uint32_t nodes = 4;
  std::uint32_t cores = 4;
  bool inject_delay = false;
};

void add_dataset_flags(CLI::App& cmd, Common& c) {
  auto* scenario = cmd.add_option("--scenario", c.scenario, "Named scenario")
                       ->check(CLI::IsMember([] {
                         std::vector<std::string> names;
                         for (const auto& s : bench::scenarios()) names.push_back(s.name);
                         return names;
                       }()));
  auto* points = cmd.add_option("--points", c.points, "Number of points");
  auto* clusters = cmd.add_option("--clusters", c.clusters, "Number of clusters");
  cmd.add_option("--dims", c.dims, "Point dimensionality")->capture_default_str();
  scenario->excludes(points)->excludes(clusters);
  points->needs(clusters);
  clusters->needs(points);
  cmd.add_option("--seed", c.seed, "Dataset and placement seed")->capture_default_str();
  cmd.add_option("--max-iter", c.max_iter, "Iteration cap")->capture_default_str();
  cmd.add_option("--epsilon", c.epsilon, "Convergence threshold")->capture_default_str();
}

void add_cluster_flags(CLI::App& cmd, Common& c) {
  cmd.add_option("--nodes", c.nodes, "Simulated nodes")->capture_default_str();
  cmd.add_option("--cores", c.cores, "Cores per node")->capture_default_str();
  cmd.add_flag("--inject-delay", c.inject_delay, "Sleep for modeled link and disk time");
}

std::pair<std::string, dataset::ScenarioSpec> scenario_of(const Common& c) {
  dataset::ScenarioSpec spec;
  std::string name = "custom";
  if (!c.scenario.empty()) {
    const auto s = bench::find_scenario(c.scenario);
    spec = s->spec;
    name = s->name;
  } else if (c.points != 0) {
    spec.n_points = c.points;
    spec.k_clusters = c.clusters;
  } else {
    fail(ErrorKind::invalid_argument, "give --scenario or --points and --clusters");
  }
  if (c.scenario.empty()) spec.dims = c.dims;
  spec.seed = c.seed;
  spec.max_iter = c.max_iter;
  spec.epsilon = c.epsilon;
  spec.validate();
  return {name, spec};
}

fabric::ClusterTopology topology_of(const Common& c) {
  fabric::ClusterTopology t;
  t.node_count = c.nodes;
  t.cores_per_node = c.cores;
  t.link.inject_delay = c.inject_delay;
  t.validate();
  return t;
}

struct EngineFlags {
  std::optional<sched::SchedulerKind> scheduler;
  std::optional<store::StoreMode> store;
  collectives::Algorithm collective = collectives::Algorithm::tree;
  bool deterministic = true;
  bool nondeterministic = false;
  bool compress = false;
  bool combine = false;
  std::uint32_t reducers = 0;
  std::uint64_t spill_threshold = 1ull << 20;
  std::int64_t job_launch_ms = 200;
  std::int64_t cu_launch_ms = 5;
  std::uint32_t ranks_per_node = 0;
  std::uint32_t replication = 3;
};

void add_engine_flags(CLI::App& cmd, EngineFlags& f) {
  cmd.add_option("--scheduler", f.scheduler, "centralized, multilevel or decentral")
      ->transform(CLI::CheckedTransformer(kSchedulers, CLI::ignore_case));
  cmd.add_option("--store", f.store, "colocated or shared")
      ->transform(CLI::CheckedTransformer(kStores, CLI::ignore_case));
  cmd.add_option("--collective", f.collective, "tree or rdouble")
      ->transform(CLI::CheckedTransformer(kAlgorithms, CLI::ignore_case));
  auto* det = cmd.add_flag("--deterministic", f.deterministic,
                           "Fix reduction order (the default)");
  cmd.add_flag("--nondeterministic", f.nondeterministic, "Reduce in arrival order")->excludes(det);
  cmd.add_flag("--compress", f.compress, "Compress shuffle and collective payloads");
  cmd.add_flag("--combine", f.combine, "Run a combiner on map output");
  cmd.add_option("--reducers", f.reducers, "Reduce tasks; 0 means one per node")
      ->capture_default_str();
  cmd.add_option("--spill-threshold-bytes", f.spill_threshold, "Map buffer spill threshold")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--job-launch-ms", f.job_launch_ms, "Per-job launch cost")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--cu-launch-ms", f.cu_launch_ms, "Per-compute-unit launch cost (pilot)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--ranks-per-node", f.ranks_per_node, "mpi-like ranks; 0 means one per core")
      ->capture_default_str();
  cmd.add_option("--replication", f.replication, "Block replicas in the colocated store")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void apply(const EngineFlags& f, bench::RunConfig& c, bool engine_defaults) {
  if (!engine_defaults || f.scheduler) c.scheduler = f.scheduler.value_or(c.scheduler);
  if (!engine_defaults || f.store) c.store_mode = f.store.value_or(c.store_mode);
  auto& o = c.options;
  o.scheduler = c.scheduler;
  o.collective = f.collective;
  o.deterministic = !f.nondeterministic;
  o.compress = f.compress;
  o.combine = f.combine;
  o.reducers = f.reducers;
  o.spill_threshold_bytes = f.spill_threshold;
  o.job_launch = std::chrono::milliseconds(f.job_launch_ms);
  o.cu_launch = std::chrono::milliseconds(f.cu_launch_ms);
  o.ranks_per_node = f.ranks_per_node;
  c.replication = f.replication;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string render(const bench::RunReport& r, bench::OutputFormat format) {
  return format == bench::OutputFormat::json ? bench::to_json(r) + "\n"
                                             : bench::csv_header() + bench::csv_row(r);
}

void print_summary(const bench::RunReport& r) {
  if (r.ok) {
    std::fprintf(stderr, "%s/%s on %s: %llu iterations%s, %.3f s, objective %.6g\n",
                 std::string(engines::engine_name(r.config.engine)).c_str(),
                 std::string(sched::scheduler_name(r.config.scheduler)).c_str(),
                 r.config.scenario_name.c_str(), static_cast<unsigned long long>(r.iterations),
                 r.converged ? " (converged)" : "", r.wall_seconds, r.objective);
  } else {
    std::fprintf(stderr, "run failed: %s\n", r.error.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed k-means benchmark across execution paradigms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ogrebench 0.1.0");

  Common common;
  EngineFlags flags;
  std::filesystem::path out;
  std::filesystem::path input;
  bench::OutputFormat format = bench::OutputFormat::json;
  auto add_format = [&](CLI::App& cmd) {
    cmd.add_option("--format", format, "csv or json")
        ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  };

  auto* generate = app.add_subcommand("generate", "Write a seeded point file");
  add_dataset_flags(*generate, common);
  generate->add_option("--out", out, "Point file path")->required();

  engines::EngineKind engine = engines::EngineKind::message_passing;
  auto* run = app.add_subcommand("run", "Run one engine and emit a report");
  add_dataset_flags(*run, common);
  add_cluster_flags(*run, common);
  add_engine_flags(*run, flags);
  add_format(*run);
  run->add_option("--engine", engine, "mapreduce, iterative, mpi-like or pilot")
      ->required()
      ->transform(CLI::CheckedTransformer(kEngines, CLI::ignore_case));
  run->add_option("--input", input, "Point file to load instead of generating")
      ->check(CLI::ExistingFile);
  run->add_option("--out", out, "Report path; stdout when omitted");

  std::vector<std::string> compare_scenarios{"i-small", "ii-small"};
  std::vector<engines::EngineKind> compare_engines{engines::EngineKind::message_passing,
                                                   engines::EngineKind::iterative_collective,
                                                   engines::EngineKind::mapreduce};
  int repetitions = bench::kRepetitions;
  auto* compare = app.add_subcommand("compare", "Median-of-N runtime comparison across engines");
  add_cluster_flags(*compare, common);
  add_engine_flags(*compare, flags);
  compare->add_option("--scenarios", compare_scenarios, "Scenario names")
      ->delimiter(',')
      ->capture_default_str();
  compare->add_option("--engines", compare_engines, "Engines, at least two")
      ->delimiter(',')
      ->transform(CLI::CheckedTransformer(kEngines, CLI::ignore_case));
  compare->add_option("--seed", common.seed, "Shared seed")->capture_default_str();
  compare->add_option("--max-iter", common.max_iter, "Iteration cap")->capture_default_str();
  compare->add_option("--repetitions", repetitions, "Runs per cell")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  compare->add_option("--out", out, "Directory for comparison.csv, bundle.json, runtime.dat");

  std::vector<engines::EngineKind> verify_engines{std::begin(engines::kAllEngines),
                                                  std::end(engines::kAllEngines)};
  bool inject_fault = false;
  auto* verify = app.add_subcommand("verify", "Check engines against the sequential oracle");
  add_dataset_flags(*verify, common);
  add_cluster_flags(*verify, common);
  verify->add_option("--engines", verify_engines, "Engines to check")
      ->delimiter(',')
      ->transform(CLI::CheckedTransformer(kEngines, CLI::ignore_case));
  verify->add_flag("--inject-assignment-fault", inject_fault,
                   "Negative control: misassign one point in iteration 1");

  auto* report = app.add_subcommand("report", "Validate and re-render a report or bundle");
  report->add_option("input", input, "Run report or comparison bundle (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  add_format(*report);
  report->add_option("--out", out, "Output path; stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (generate->parsed()) {
      const auto [name, spec] = scenario_of(common);
      dataset::generate(spec).write(out);
      std::fprintf(stderr, "wrote %llu points (%s) to %s\n",
                   static_cast<unsigned long long>(spec.n_points), name.c_str(),
                   out.string().c_str());
      return kOk;
    }

    if (run->parsed()) {
      bench::RunConfig config;
      if (!input.empty() && common.scenario.empty() && common.points == 0) {
        // Sizes come from the file; k still has to be given.
        if (common.clusters == 0) fail(ErrorKind::invalid_argument, "--input needs --clusters");
        common.points = common.clusters;
      }
      const auto [name, spec] = scenario_of(common);
      config = bench::RunConfig::for_engine(engine, bench::Scenario{name, spec});
      config.topology = topology_of(common);
      apply(flags, config, true);
      config.input = input;
      config.output = out;
      config.format = format;
      const auto r = bench::execute(config);
      write_text(out, render(r, format));
      print_summary(r);
      return r.ok ? kOk : kRunFailure;
    }

    if (compare->parsed()) {
      bench::CompareConfig config;
      config.scenarios = compare_scenarios;
      config.engines = compare_engines;
      config.repetitions = repetitions;
      config.base.topology = topology_of(common);
      config.base.scenario.seed = common.seed;
      config.base.scenario.max_iter = common.max_iter;
      apply(flags, config.base, true);
      config.per_engine_defaults = !flags.scheduler && !flags.store;
      if (!config.per_engine_defaults) {
        for (auto e : config.engines) {
          auto c = config.base;
          c.engine = e;
          c.validate();
        }
      }
      const auto result = bench::compare(config);
      std::cout << bench::comparison_csv(result);
      if (!out.empty()) bench::write_comparison(result, out);
      for (const auto& v : result.verdicts) std::fprintf(stderr, "%s\n", v.line.c_str());
      return result.complete() ? kOk : kRunFailure;
    }

    if (verify->parsed()) {
      bench::VerifyConfig config;
      std::tie(config.scenario_name, config.scenario) = scenario_of(common);
      config.topology = topology_of(common);
      config.engines = verify_engines;
      config.inject_assignment_fault = inject_fault;
      bool all = true;
      for (const auto& c : bench::verify(config)) {
        all = all && c.pass;
        std::printf("%-9s %-11s %s", std::string(engines::engine_name(c.engine)).c_str(),
                    std::string(sched::scheduler_name(c.scheduler)).c_str(),
                    c.pass ? "PASS" : "FAIL");
        if (c.pass) {
          std::printf(" (%llu iterations)\n", static_cast<unsigned long long>(c.iterations));
        } else if (c.divergence) {
          const auto& d = *c.divergence;
          std::printf(" at iteration %zu centroid %zu coordinate %zu: expected %.17g got %.17g\n",
                      d.iteration, d.centroid, d.coordinate, d.expected, d.actual);
        } else {
          std::printf(": %s\n", c.error.c_str());
        }
      }
      return all ? kOk : kRunFailure;
    }

    if (report->parsed()) {
      const auto text = read_text(input);
      if (text.find(bench::kBundleSchema) != std::string::npos) {
        const auto result = bench::bundle_from_json(text);
        write_text(out, format == bench::OutputFormat::csv ? bench::comparison_csv(result)
                                                           : bench::bundle_json(result) + "\n");
        return result.complete() ? kOk : kRunFailure;
      }
      if (const auto errors = bench::schema_errors(text); !errors.empty()) {
        for (const auto& e : errors) std::fprintf(stderr, "schema: %s\n", e.c_str());
        return kUsage;
      }
      const auto r = bench::report_from_json(text);
      write_text(out, render(r, format));
      return r.ok ? kOk : kRunFailure;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "ogrebench: %s\n", e.what());
    const bool usage = e.kind() == ErrorKind::invalid_argument ||
                       e.kind() == ErrorKind::shape_mismatch;
    return usage ? kUsage : kRunFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ogrebench: %s\n", e.what());
    return kRunFailure;
  }
  return kUsage;
}
