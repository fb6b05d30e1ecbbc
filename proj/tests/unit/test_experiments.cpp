// Copyright 2026 The epimi Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "epimi/experiments.hpp"
#include "epimi/io.hpp"
#include "epimi/synthetic_oracle.hpp"

using namespace epimi;

namespace {

std::size_t line_count(const std::string& text) {
  std::size_t count = 0;
  for (char c : text) count += (c == '\n');
  return count;
}

}  // namespace

TEST_CASE("synth convergence runner is deterministic with a pinned schema") {
  SynthConvergenceConfig config;
  config.arities = {2};
  config.temps = {1.0, 10.0};
  config.k_min = 10;
  config.k_max = 100;
  config.k_steps = 4;
  config.repetitions = 2;
  config.seed = 5;

  const auto rows = run_synth_convergence(config);
  CHECK(rows.size() == 2 * 4 * 2);
  const std::string csv = convergence_csv(rows);
  CHECK(csv.rfind("# epimi synth-convergence schema v1\nn,temp,k,rep,"
                  "mi_estimate,mi_exact\n",
                  0) == 0);
  CHECK(line_count(csv) == rows.size() + 2);

  // Identical bytes on a rerun with the same seed; different otherwise.
  CHECK(convergence_csv(run_synth_convergence(config)) == csv);
  config.seed = 6;
  CHECK(convergence_csv(run_synth_convergence(config)) != csv);

  // The exact column is constant within a grid cell.
  for (const ConvergenceRow& row : rows) {
    if (row.n == 2 && row.temp == 1.0) {
      CHECK(row.exact == rows.front().exact);
    }
  }
}

TEST_CASE("missing mass runner dominates the exact expectation with bounds") {
  MissingMassConfig config;
  config.family = MissingMassFamily::kUniform;
  config.support = 20;
  config.k_grid = {5, 20, 60};
  config.trials = 400;
  config.seed = 3;

  const auto rows = run_missing_mass(config);
  REQUIRE(rows.size() == 3);
  for (const MissingMassRow& row : rows) {
    CHECK(row.expected <= row.bound_finite + 1e-12);
    CHECK(row.q05 <= row.q50);
    CHECK(row.q50 <= row.q95);
    CHECK(row.mc_mean >= 0.0);
  }
  const std::string csv = missing_mass_csv(rows, config);
  CHECK(csv.rfind("# epimi missing-mass schema v1\n", 0) == 0);
  CHECK(missing_mass_csv(run_missing_mass(config), config) == csv);

  config.family = MissingMassFamily::kZipf;
  config.alpha = 2.0;
  CHECK(run_missing_mass(config).size() == 3);
  config.family = MissingMassFamily::kGibbs;
  CHECK(run_missing_mass(config).size() == 3);
}

TEST_CASE("calibrate-evaluate runner aggregates per stratum") {
  CalibrateEvaluateConfig config;
  config.benchmark.single_queries = 30;
  config.benchmark.multi_queries = 30;
  config.benchmark.seed = 11;
  config.repetitions = 3;
  config.seed = 11;

  const CalibrationOutcome outcome = run_calibrate_evaluate(config);
  REQUIRE(outcome.scored.size() == 4);
  for (const auto& [kind, table] : outcome.scored) {
    CHECK(table.size() == 60);
  }
  bool has_all = false, has_single = false, has_multi = false;
  for (const StratumStats& s : outcome.stats) {
    has_all |= (s.stratum == "all");
    has_single |= (s.stratum == "single");
    has_multi |= (s.stratum == "multi");
    CHECK(s.repetitions == 3);
    CHECK(s.mean_recall >= 0.0);
    CHECK(s.mean_recall <= 1.0);
  }
  CHECK(has_all);
  CHECK(has_single);
  CHECK(has_multi);

  const std::string csv = calibration_csv(outcome.stats);
  CHECK(csv.rfind("# epimi calibrate-evaluate schema v1\n", 0) == 0);
  CHECK(calibration_csv(run_calibrate_evaluate(config).stats) == csv);
}

TEST_CASE("calibrate-evaluate accepts an ingested dataset and backend") {
  std::istringstream dataset(
      R"({"query":"colors","answers":["red","green"],"tag":"multi"}
{"query":"capital","answers":["paris"],"tag":"single"}
{"query":"planet","answers":["mars"],"tag":"single"}
{"query":"metal","answers":["iron"],"tag":"single"}
)");
  const auto records = read_jsonl_records(dataset);
  SyntheticOracle oracle;
  oracle.add_query("colors", {{{"red", 0.5}, {"green", 0.5}},
                              ContextPolicy::kIndependent, 0.0, {}});
  oracle.add_query("capital",
                   {{{"paris", 0.95}, {"lyon", 0.05}},
                    ContextPolicy::kIndependent, 0.0, {}});
  oracle.add_query("planet", {{{"mars", 0.9}, {"venus", 0.1}},
                              ContextPolicy::kIndependent, 0.0, {}});
  oracle.add_query("metal", {{{"iron", 0.85}, {"zinc", 0.15}},
                             ContextPolicy::kIndependent, 0.0, {}});
  CalibrateEvaluateConfig config;
  config.repetitions = 2;
  config.seed = 4;
  const CalibrationOutcome outcome =
      run_calibrate_evaluate(config, records, oracle);
  REQUIRE(outcome.scored.size() == 4);
  for (const auto& [kind, table] : outcome.scored) {
    CHECK(table.size() == 4);
    for (const auto& q : table) CHECK(q.correct);
  }
}

TEST_CASE("amplify runner emits the curve schema") {
  SyntheticOracle oracle;
  oracle.add_query("What is the capital of the UK?",
                   {{{"London", 0.9}, {"Paris", 0.05}},
                    ContextPolicy::kCopier,
                    0.7,
                    {}});
  AmplifyConfig config;
  config.query = "What is the capital of the UK?";
  config.target = "London";
  config.repeated = "Paris";
  config.t_values = {0, 1, 5};
  const std::string csv = amplify_csv(oracle, config);
  CHECK(csv.rfind("# epimi amplify schema v1\nt,normalized_target_prob\n", 0) ==
        0);
  CHECK(line_count(csv) == 5);
}

TEST_CASE("attention demo runner produces increasing y mass") {
  AttentionDemoConfig config;
  config.t_values = {1, 10, 100};
  config.seed = 2;
  const std::string csv = attention_demo_csv(config);
  CHECK(csv.rfind("# epimi attention-demo schema v1\nt,y_mass,output_distance\n",
                  0) == 0);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  double previous = -1.0;
  while (std::getline(in, line)) {
    const auto first_comma = line.find(',');
    const auto second_comma = line.find(',', first_comma + 1);
    const double mass = std::stod(
        line.substr(first_comma + 1, second_comma - first_comma - 1));
    CHECK(mass > previous);
    previous = mass;
  }
  CHECK(attention_demo_csv(config) == csv);
}

TEST_CASE("svg chart and file io") {
  const SvgSeries series{"estimate", {1, 10, 100}, {0.5, 0.4, 0.35}};
  const std::string svg =
      svg_line_chart("convergence", "k", "value", {&series, 1}, true);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("estimate") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "epimi_io_test";
  const auto path = dir / "nested" / "chart.svg";
  write_text_file(path, svg);
  CHECK(read_text_file(path) == svg);
  std::filesystem::remove_all(dir);
}
