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

#include "epimi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epimi/attention.hpp"
#include "epimi/categorical.hpp"
#include "epimi/error.hpp"
#include "epimi/gibbs.hpp"
#include "epimi/io.hpp"
#include "epimi/missing_mass.hpp"
#include "epimi/parallel.hpp"
#include "epimi/rng.hpp"

namespace epimi {

namespace {

std::vector<std::size_t> linspace_sizes(std::size_t lo, std::size_t hi,
                                        std::size_t steps) {
  if (steps < 2 || hi <= lo) return {hi};
  std::vector<std::size_t> out;
  out.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    out.push_back(lo + i * (hi - lo) / (steps - 1));
  }
  return out;
}

std::ostringstream csv_stream() { return std::ostringstream{}; }

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

std::vector<ConvergenceRow> run_synth_convergence(
    const SynthConvergenceConfig& config) {
  if (config.arities.empty() || config.temps.empty()) {
    throw Error("synth-convergence: grids must be nonempty");
  }
  if (config.repetitions == 0) {
    throw Error("synth-convergence: repetitions must be >= 1");
  }
  const std::vector<std::size_t> k_grid =
      linspace_sizes(config.k_min, config.k_max, config.k_steps);

  struct Cell {
    std::size_t n;
    double temp;
  };
  std::vector<Cell> cells;
  for (std::size_t n : config.arities) {
    for (double temp : config.temps) cells.push_back({n, temp});
  }

  std::vector<std::vector<ConvergenceRow>> per_cell(cells.size());
  parallel_for(
      cells.size(),
      [&](std::size_t c) {
        const Categorical dist = make_gibbs(cells[c].n, cells[c].temp);
        const double exact = mutual_information_exact(dist);
        auto& rows = per_cell[c];
        for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
          const std::size_t k = k_grid[ki];
          for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
            const std::uint64_t stream =
                (c * 1024 + ki) * 1024 + rep;
            const std::vector<Tuple> sample =
                sample_tuples(dist, k, derive_seed(config.seed, stream));
            const double gamma = 1.0 / static_cast<double>(k);
            const MIEstimate est = estimate_mi_plugin(
                sample, [&](const Tuple& t) { return dist.prob(t); },
                {gamma, gamma});
            rows.push_back(
                {cells[c].n, cells[c].temp, k, rep, est.value, exact});
          }
        }
      },
      config.workers);

  std::vector<ConvergenceRow> rows;
  for (auto& cell_rows : per_cell) {
    rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
  }
  return rows;
}

std::string convergence_csv(std::span<const ConvergenceRow> rows) {
  auto out = csv_stream();
  out << "# epimi synth-convergence schema v1\n";
  out << "n,temp,k,rep,mi_estimate,mi_exact\n";
  for (const ConvergenceRow& r : rows) {
    out << r.n << ',' << format_number(r.temp) << ',' << r.k << ',' << r.rep
        << ',' << format_number(r.estimate) << ',' << format_number(r.exact)
        << '\n';
  }
  return out.str();
}

std::vector<MissingMassRow> run_missing_mass(const MissingMassConfig& config) {
  if (config.k_grid.empty()) throw Error("missing-mass: empty k grid");
  if (config.trials == 0) throw Error("missing-mass: trials must be >= 1");

  Categorical dist = [&] {
    switch (config.family) {
      case MissingMassFamily::kUniform: {
        std::vector<Atom> atoms;
        for (std::size_t i = 0; i < config.support; ++i) {
          atoms.emplace_back(static_cast<std::int64_t>(i));
        }
        auto space = std::make_shared<const TupleSpace>(
            std::vector<std::vector<Atom>>{std::move(atoms)});
        return Categorical(std::move(space),
                           std::vector<double>(config.support,
                                               1.0 / config.support));
      }
      case MissingMassFamily::kZipf:
        return make_zipf(config.support, config.alpha);
      case MissingMassFamily::kGibbs:
        return make_gibbs(config.gibbs_n, config.gibbs_temp);
    }
    throw Error("missing-mass: unknown family");
  }();

  const double h = entropy(dist);
  std::vector<MissingMassRow> rows(config.k_grid.size());
  parallel_for(
      config.k_grid.size(),
      [&](std::size_t ki) {
        const std::size_t k = config.k_grid[ki];
        std::vector<double> realized(config.trials);
        for (std::size_t trial = 0; trial < config.trials; ++trial) {
          const auto sample = sample_indices(
              dist, k, derive_seed(config.seed, ki * 1000003 + trial));
          realized[trial] = missing_mass_exact(dist, sample);
        }
        std::sort(realized.begin(), realized.end());
        auto quantile = [&](double q) {
          const auto idx = static_cast<std::size_t>(
              q * static_cast<double>(realized.size() - 1));
          return realized[idx];
        };
        MissingMassRow row;
        row.k = k;
        row.expected = expected_missing_mass_exact(dist, k);
        row.bound_finite = bound_finite(dist.support_size(), k);
        row.bound_entropy = bound_entropy(h, k).value;
        row.mc_mean = mean_of(realized);
        row.q05 = quantile(0.05);
        row.q50 = quantile(0.50);
        row.q95 = quantile(0.95);
        row.epsilon = epsilon_k(row.expected, k, config.delta).clamped;
        rows[ki] = row;
      },
      config.workers);
  return rows;
}

std::string missing_mass_csv(std::span<const MissingMassRow> rows,
                             const MissingMassConfig& config) {
  auto out = csv_stream();
  out << "# epimi missing-mass schema v1\n";
  out << "k,expected_uk,bound_finite,bound_entropy,mc_mean,mc_q05,mc_q50,"
         "mc_q95,epsilon_k,delta\n";
  for (const MissingMassRow& r : rows) {
    out << r.k << ',' << format_number(r.expected) << ','
        << format_number(r.bound_finite) << ',' << format_number(r.bound_entropy)
        << ',' << format_number(r.mc_mean) << ',' << format_number(r.q05) << ','
        << format_number(r.q50) << ',' << format_number(r.q95) << ','
        << format_number(r.epsilon) << ',' << format_number(config.delta)
        << '\n';
  }
  return out.str();
}

CalibrationOutcome run_calibrate_evaluate(
    const CalibrateEvaluateConfig& config) {
  const SyntheticBenchmark bench = make_mixed_benchmark(config.benchmark);
  return run_calibrate_evaluate(config, bench.records, *bench.oracle);
}

CalibrationOutcome run_calibrate_evaluate(const CalibrateEvaluateConfig& config,
                                          std::span<const QueryRecord> records,
                                          const ConditionalModel& model) {
  if (config.repetitions == 0) {
    throw Error("calibrate-evaluate: repetitions must be >= 1");
  }
  const std::size_t count = records.size();
  if (count < 2) throw Error("calibrate-evaluate: dataset too small");

  // Score every record once; calibration repetitions reshuffle the split.
  const ScoreKind kinds[] = {ScoreKind::kT0, ScoreKind::kSemanticEntropy,
                             ScoreKind::kSelfVerification,
                             ScoreKind::kMutualInformation};
  std::vector<std::map<ScoreKind, MethodScore>> raw(count);
  parallel_for(
      count,
      [&](std::size_t i) {
        raw[i] = score_query(model, records[i].query, config.score_options,
                             derive_seed(config.seed, 500'000 + i));
      },
      config.workers);

  CalibrationOutcome outcome;
  for (ScoreKind kind : kinds) {
    auto& table = outcome.scored[kind];
    table.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const MethodScore& ms = raw[i].at(kind);
      ScoredQuery sq;
      sq.query = records[i].query;
      sq.tag = records[i].tag;
      sq.prediction = ms.prediction;
      sq.scores[kind] = ms.score;
      sq.correct = matches_any_answer(ms.prediction, records[i].answers,
                                      config.score_options.tau);
      table.push_back(std::move(sq));
    }
  }

  std::vector<std::string> strata{"all"};
  for (const auto& record : records) {
    if (std::find(strata.begin(), strata.end(), record.tag) == strata.end()) {
      strata.push_back(record.tag);
    }
  }

  // recall/error samples per (kind, stratum) across repetitions
  std::map<ScoreKind, std::map<std::string, std::vector<double>>> recalls;
  std::map<ScoreKind, std::map<std::string, std::vector<double>>> errors;

  std::vector<std::size_t> order(count);
  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    Rng rng(derive_seed(config.seed, 900'000 + rep));
    for (std::size_t i = count; i-- > 1;) {
      std::swap(order[i], order[rng.below(i + 1)]);
    }
    const std::size_t half = count / 2;
    for (ScoreKind kind : kinds) {
      const auto& table = outcome.scored.at(kind);
      std::vector<ScoredQuery> calib, test;
      for (std::size_t i = 0; i < half; ++i) calib.push_back(table[order[i]]);
      for (std::size_t i = half; i < count; ++i) {
        test.push_back(table[order[i]]);
      }
      const AbstentionPolicy policy =
          calibrate_threshold(calib, kind, config.target_loss);
      for (const std::string& stratum : strata) {
        std::vector<ScoredQuery> subset;
        if (stratum == "all") {
          subset = test;
        } else {
          for (const auto& q : test) {
            if (q.tag == stratum) subset.push_back(q);
          }
        }
        if (subset.empty()) continue;
        const EvalMetrics m = evaluate(subset, policy);
        recalls[kind][stratum].push_back(m.recall);
        errors[kind][stratum].push_back(m.error_rate);
      }
    }
  }

  for (ScoreKind kind : kinds) {
    for (const std::string& stratum : strata) {
      const auto& r = recalls[kind][stratum];
      if (r.empty()) continue;
      const auto& e = errors[kind][stratum];
      StratumStats s;
      s.score = score_name(kind);
      s.stratum = stratum;
      s.repetitions = r.size();
      s.mean_recall = mean_of(r);
      s.two_sd_recall = 2.0 * sample_sd(r, s.mean_recall);
      s.mean_error = mean_of(e);
      s.two_sd_error = 2.0 * sample_sd(e, s.mean_error);
      outcome.stats.push_back(std::move(s));
    }
  }
  return outcome;
}

std::string calibration_csv(std::span<const StratumStats> stats) {
  auto out = csv_stream();
  out << "# epimi calibrate-evaluate schema v1\n";
  out << "score_name,stratum,repetitions,mean_recall,two_sd_recall,"
         "mean_error,two_sd_error\n";
  for (const StratumStats& s : stats) {
    out << s.score << ',' << s.stratum << ',' << s.repetitions << ','
        << format_number(s.mean_recall) << ',' << format_number(s.two_sd_recall)
        << ',' << format_number(s.mean_error) << ','
        << format_number(s.two_sd_error) << '\n';
  }
  return out.str();
}

std::string amplify_csv(const ConditionalModel& model,
                        const AmplifyConfig& config) {
  const auto curve = amplification_curve(model, config.query, config.target,
                                         config.repeated, config.t_values);
  auto out = csv_stream();
  out << "# epimi amplify schema v1\n";
  out << "t,normalized_target_prob\n";
  for (const AmplificationPoint& p : curve) {
    out << p.t << ',' << format_number(p.normalized_target_prob) << '\n';
  }
  return out.str();
}

std::string attention_demo_csv(const AttentionDemoConfig& config) {
  Rng rng(config.seed);
  auto random_matrix = [&](std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = 0.5 * rng.normal();
    return m;
  };
  AttentionHead head;
  head.wq = random_matrix(config.d_prime, config.d);
  head.wk = random_matrix(config.d_prime, config.d);
  head.wv = random_matrix(config.d_prime, config.d);
  head.end_vector.resize(config.d_prime);
  for (double& v : head.end_vector) v = rng.normal();

  std::vector<double> x(config.d_prime), y(config.d_prime);
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = rng.normal();

  const auto points = repetition_experiment(head, x, y, config.t_values);
  auto out = csv_stream();
  out << "# epimi attention-demo schema v1\n";
  out << "t,y_mass,output_distance\n";
  for (const RepetitionPoint& p : points) {
    out << p.t << ',' << format_number(p.y_mass) << ','
        << format_number(p.output_distance) << '\n';
  }
  return out.str();
}

}  // namespace epimi
