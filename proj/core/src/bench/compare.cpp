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

#include "ogre/bench/compare.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ogre/error.hpp"

namespace ogre::bench {

using nlohmann::json;
using fabric::Counter;

bool Comparison::complete() const noexcept {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.status != "incomplete"; });
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorKind::invalid_argument, "median of an empty set");
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

Verdict judge(const std::string& scenario, const std::vector<const Cell*>& cells) {
  Verdict v;
  v.scenario = scenario;
  std::vector<std::string> failed;
  for (const auto* c : cells) {
    if (!c->complete) failed.emplace_back(engines::engine_name(c->engine));
  }
  if (!failed.empty()) {
    v.status = "incomplete";
    v.line = scenario + ": incomplete (failed:";
    for (const auto& f : failed) v.line += " " + f;
    v.line += ")";
    return v;
  }
  auto sorted = cells;
  // Ties keep the configured engine order so the verdict stays a pure function.
  std::stable_sort(sorted.begin(), sorted.end(), [](const Cell* a, const Cell* b) {
    return a->median_seconds < b->median_seconds;
  });
  bool ordered = true;
  std::ostringstream line;
  line << scenario << ": ";
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    v.fastest_first.push_back(sorted[i]->engine);
    if (i > 0) {
      const double faster = sorted[i - 1]->median_seconds;
      const double gap = faster > 0.0 ? sorted[i]->median_seconds / faster : 0.0;
      v.gaps.push_back(gap);
      if (!(gap >= kOrderingGap)) ordered = false;
      line << (gap >= kOrderingGap ? " < " : " ~ ");
    }
    line << engines::engine_name(sorted[i]->engine);
  }
  v.status = ordered ? "ordered" : "inconclusive";
  line << " [" << v.status;
  line.precision(2);
  line << std::fixed;
  if (!v.gaps.empty()) {
    line << "; gaps";
    for (double g : v.gaps) line << ' ' << g;
  }
  line << ']';
  v.line = line.str();
  return v;
}

const RunReport* first_ok(const Comparison& c, const Cell& cell) {
  for (const auto& r : c.reports) {
    if (r.ok && r.config.scenario_name == cell.scenario && r.config.engine == cell.engine) return &r;
  }
  return nullptr;
}

const Cell* find_cell(const Comparison& c, const std::string& scenario, engines::EngineKind e) {
  for (const auto& cell : c.cells) {
    if (cell.scenario == scenario && cell.engine == e) return &cell;
  }
  return nullptr;
}

}  // namespace

Comparison summarize(std::vector<RunReport> reports) {
  Comparison out;
  out.reports = std::move(reports);
  std::vector<std::string> scenario_order;
  for (const auto& r : out.reports) {
    const auto& name = r.config.scenario_name;
    if (std::find(scenario_order.begin(), scenario_order.end(), name) == scenario_order.end()) {
      scenario_order.push_back(name);
    }
    auto it = std::find_if(out.cells.begin(), out.cells.end(), [&](const Cell& c) {
      return c.scenario == name && c.engine == r.config.engine;
    });
    if (it == out.cells.end()) {
      out.cells.push_back(Cell{name, r.config.engine, {}, 0.0, true});
      it = std::prev(out.cells.end());
    }
    if (r.ok) {
      it->wall_seconds.push_back(r.wall_seconds);
    } else {
      it->complete = false;
    }
  }
  for (auto& c : out.cells) {
    if (c.wall_seconds.empty()) c.complete = false;
    if (!c.wall_seconds.empty()) c.median_seconds = median(c.wall_seconds);
  }
  for (const auto& s : scenario_order) {
    std::vector<const Cell*> cells;
    for (const auto& c : out.cells) {
      if (c.scenario == s) cells.push_back(&c);
    }
    out.verdicts.push_back(judge(s, cells));
  }
  return out;
}

Comparison compare(const CompareConfig& config) {
  if (config.engines.size() < 2) fail(ErrorKind::invalid_argument, "compare needs >= 2 engines");
  if (config.scenarios.empty()) fail(ErrorKind::invalid_argument, "compare needs a scenario");
  if (config.repetitions < 1) fail(ErrorKind::invalid_argument, "repetitions must be >= 1");
  std::vector<RunConfig> cells;
  for (const auto& name : config.scenarios) {
    const auto scenario = find_scenario(name);
    if (!scenario) fail(ErrorKind::invalid_argument, "unknown scenario '" + name + "'");
    for (auto engine : config.engines) {
      RunConfig c = config.base;
      c.scenario_name = scenario->name;
      c.scenario.n_points = scenario->spec.n_points;
      c.scenario.k_clusters = scenario->spec.k_clusters;
      c.engine = engine;
      if (config.per_engine_defaults) {
        c.scheduler = engines::default_scheduler(engine);
        c.store_mode = default_store(engine);
      }
      c.options.scheduler = c.scheduler;
      c.validate();
      cells.push_back(std::move(c));
    }
  }
  // Repetitions are the outer loop so slow drift on the host spreads across
  // engines instead of biasing one of them. Cells never run concurrently.
  std::vector<RunReport> reports;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    for (const auto& c : cells) reports.push_back(execute(c));
  }
  return summarize(std::move(reports));
}

bool ordering_holds(const Comparison& comparison, const std::string& scenario,
                    const std::vector<engines::EngineKind>& order) {
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const auto* faster = find_cell(comparison, scenario, order[i]);
    const auto* slower = find_cell(comparison, scenario, order[i + 1]);
    if (faster == nullptr || slower == nullptr || !faster->complete || !slower->complete) {
      return false;
    }
    if (!(slower->median_seconds >= kOrderingGap * faster->median_seconds)) return false;
  }
  return true;
}

std::string comparison_csv(const Comparison& comparison) {
  std::ostringstream out;
  out << "scenario,engine,scheduler,store,repetitions,median_seconds,min_seconds,max_seconds,"
         "map_output_bytes,shuffle_bytes,store_bytes_read,jobs_launched,status\n";
  out.precision(6);
  out << std::fixed;
  for (const auto& cell : comparison.cells) {
    const auto* r = first_ok(comparison, cell);
    const auto [lo, hi] = cell.wall_seconds.empty()
                              ? std::pair{0.0, 0.0}
                              : std::pair{*std::min_element(cell.wall_seconds.begin(),
                                                            cell.wall_seconds.end()),
                                          *std::max_element(cell.wall_seconds.begin(),
                                                            cell.wall_seconds.end())};
    const fabric::MetricsRecord m = r != nullptr ? r->metrics : fabric::MetricsRecord{};
    out << cell.scenario << ',' << engines::engine_name(cell.engine) << ','
        << (r != nullptr ? sched::scheduler_name(r->config.scheduler) : "") << ','
        << (r != nullptr ? store_mode_name(r->config.store_mode) : "") << ','
        << cell.wall_seconds.size() << ',' << cell.median_seconds << ',' << lo << ',' << hi << ','
        << m[Counter::map_output_bytes] << ',' << m[Counter::shuffle_bytes] << ','
        << m[Counter::store_bytes_read] << ',' << m[Counter::jobs_launched] << ','
        << (cell.complete ? "ok" : "failed") << '\n';
  }
  for (const auto& v : comparison.verdicts) out << "# verdict " << v.line << '\n';
  return out.str();
}

std::string bundle_json(const Comparison& comparison) {
  json reports = json::array();
  for (const auto& r : comparison.reports) reports.push_back(json::parse(to_json(r, -1)));
  json verdicts = json::array();
  for (const auto& v : comparison.verdicts) {
    json order = json::array();
    for (auto e : v.fastest_first) order.push_back(engines::engine_name(e));
    verdicts.push_back(json{{"scenario", v.scenario},
                            {"status", v.status},
                            {"fastest_first", order},
                            {"gaps", v.gaps},
                            {"line", v.line}});
  }
  return json{{"schema", kBundleSchema}, {"reports", reports}, {"verdicts", verdicts}}.dump(2);
}

Comparison bundle_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("malformed bundle: ") + e.what());
  }
  if (j.value("schema", std::string{}) != kBundleSchema) {
    fail(ErrorKind::io, "not a " + std::string(kBundleSchema) + " document");
  }
  std::vector<RunReport> reports;
  for (const auto& r : j.at("reports")) reports.push_back(report_from_json(r.dump()));
  // Verdicts are recomputed; the stored ones are informational.
  return summarize(std::move(reports));
}

std::string gnuplot_data(const Comparison& comparison) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  bool first = true;
  for (const auto& v : comparison.verdicts) {
    if (!first) out << "\n\n";
    first = false;
    out << "# scenario " << v.scenario << "\n# engine median_seconds min_seconds max_seconds\n";
    for (const auto& cell : comparison.cells) {
      if (cell.scenario != v.scenario || cell.wall_seconds.empty()) continue;
      out << engines::engine_name(cell.engine) << ' ' << cell.median_seconds << ' '
          << *std::min_element(cell.wall_seconds.begin(), cell.wall_seconds.end()) << ' '
          << *std::max_element(cell.wall_seconds.begin(), cell.wall_seconds.end()) << '\n';
    }
  }
  return out.str();
}

void write_comparison(const Comparison& comparison, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    f << text;
    if (!f) fail(ErrorKind::io, "cannot write " + (dir / name).string());
  };
  put("comparison.csv", comparison_csv(comparison));
  put("bundle.json", bundle_json(comparison));
  put("runtime.dat", gnuplot_data(comparison));
}

std::vector<EngineCheck> verify(const VerifyConfig& config) {
  config.scenario.validate();
  config.topology.validate();
  if (config.scenario.n_points > kVerifyMaxPoints) {
    fail(ErrorKind::invalid_argument, "verify is limited to " + std::to_string(kVerifyMaxPoints) +
                                          " points; the oracle is sequential");
  }
  const auto file = dataset::generate(config.scenario);
  const auto initial =
      dataset::init_centroids(file, config.scenario.k_clusters, config.scenario.seed);
  const auto reference = kernel::run_reference(file.view(), initial, config.scenario.max_iter,
                                               config.scenario.epsilon);
  std::vector<EngineCheck> checks;
  for (auto engine : config.engines) {
    EngineCheck check;
    check.engine = engine;
    check.scheduler = engines::default_scheduler(engine);
    engines::TestbedConfig tc;
    tc.topology = config.topology;
    tc.store.mode = default_store(engine);
    tc.store.seed = config.scenario.seed;
    tc.seed = config.scenario.seed;
    engines::EngineOptions opts;
    opts.scheduler = check.scheduler;
    opts.deterministic = true;
    opts.inject_assignment_fault = config.inject_assignment_fault;
    try {
      engines::Testbed tb(tc);
      tb.ingest(file);
      const auto run = engines::run_engine(
          engine, tb, {initial, config.scenario.max_iter, config.scenario.epsilon}, opts);
      check.iterations = run.result.iterations;
      check.divergence =
          kernel::first_divergence(reference.trajectory, run.result.trajectory, config.tolerance);
      check.pass = !check.divergence.has_value();
    } catch (const std::exception& e) {
      check.error = e.what();
      check.pass = false;
    }
    checks.push_back(std::move(check));
  }
  return checks;
}

}  // namespace ogre::bench
