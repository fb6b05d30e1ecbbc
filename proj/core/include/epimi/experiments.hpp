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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "epimi/scores.hpp"
#include "epimi/synth_benchmark.hpp"

namespace epimi {

// Experiment runners used by both the CLI and the test suites. Each runner
// is deterministic given its seed; CSV emitters carry a versioned schema
// comment line pinned by golden tests.

struct SynthConvergenceConfig {
  std::vector<std::size_t> arities{2, 4, 8};
  std::vector<double> temps{0.01, 0.1, 1.0, 10.0};
  std::size_t k_min = 10;
  std::size_t k_max = 1000;
  std::size_t k_steps = 20;
  std::size_t repetitions = 1;  // independent seeds per grid cell
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

struct ConvergenceRow {
  std::size_t n = 0;
  double temp = 0.0;
  std::size_t k = 0;
  std::size_t rep = 0;
  double estimate = 0.0;
  double exact = 0.0;
};

std::vector<ConvergenceRow> run_synth_convergence(
    const SynthConvergenceConfig& config);
std::string convergence_csv(std::span<const ConvergenceRow> rows);

enum class MissingMassFamily { kUniform, kZipf, kGibbs };

struct MissingMassConfig {
  MissingMassFamily family = MissingMassFamily::kUniform;
  std::size_t support = 100;  // uniform/zipf support size
  double alpha = 2.0;         // zipf exponent
  std::size_t gibbs_n = 2;
  double gibbs_temp = 1.0;
  std::vector<std::size_t> k_grid{10, 30, 100, 300, 1000};
  std::size_t trials = 1000;
  double delta = 0.05;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

struct MissingMassRow {
  std::size_t k = 0;
  double expected = 0.0;
  double bound_finite = 0.0;
  double bound_entropy = 0.0;
  double mc_mean = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  double epsilon = 0.0;
};

std::vector<MissingMassRow> run_missing_mass(const MissingMassConfig& config);
std::string missing_mass_csv(std::span<const MissingMassRow> rows,
                             const MissingMassConfig& config);

struct CalibrateEvaluateConfig {
  BenchmarkSpec benchmark;
  std::size_t repetitions = 10;
  double target_loss = 0.05;
  ScoreOptions score_options;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

struct StratumStats {
  std::string score;
  std::string stratum;  // "all" or a record tag
  std::size_t repetitions = 0;
  double mean_recall = 0.0;
  double two_sd_recall = 0.0;
  double mean_error = 0.0;
  double two_sd_error = 0.0;
};

struct CalibrationOutcome {
  std::vector<StratumStats> stats;
  std::map<ScoreKind, std::vector<ScoredQuery>> scored;  // full tables
};

/// Generates the synthetic mixed benchmark and runs the full pipeline.
CalibrationOutcome run_calibrate_evaluate(
    const CalibrateEvaluateConfig& config);

/// Same pipeline over an ingested dataset scored against a caller-provided
/// backend.
CalibrationOutcome run_calibrate_evaluate(const CalibrateEvaluateConfig& config,
                                          std::span<const QueryRecord> records,
                                          const ConditionalModel& model);

std::string calibration_csv(std::span<const StratumStats> stats);

struct AmplifyConfig {
  std::string query;
  std::string target;
  std::string repeated;
  std::vector<std::size_t> t_values{0, 1, 2, 5, 10, 20, 50, 100};
};

std::string amplify_csv(const ConditionalModel& model,
                        const AmplifyConfig& config);

struct AttentionDemoConfig {
  std::size_t d_prime = 3;
  std::size_t d = 3;
  std::vector<std::size_t> t_values{1,  2,  3,   5,   10,   20,   50,
                                    100, 200, 500, 1000, 5000, 10000};
  std::uint64_t seed = 1;
};

std::string attention_demo_csv(const AttentionDemoConfig& config);

}  // namespace epimi
