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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epimi/error.hpp"
#include "epimi/experiments.hpp"
#include "epimi/http_backend.hpp"
#include "epimi/io.hpp"
#include "epimi/scores.hpp"
#include "epimi/synthetic_oracle.hpp"

namespace {

using namespace epimi;

struct CommonOptions {
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string backend = "synthetic";
  std::string config_path;
  bool svg = false;
};

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("config file " + path + ": " + e.what());
  }
}

/// Oracle spec from config JSON:
/// {"oracle": {"queries": {"<query>": {"base": {"text": prob, ...},
///   "policy": "independent|copier|sticky", "strength": s,
///   "conditional": {"<answer>": {"text": prob, ...}}}}}}
std::shared_ptr<SyntheticOracle> oracle_from_config(const nlohmann::json& config) {
  auto oracle = std::make_shared<SyntheticOracle>();
  if (!config.contains("oracle")) {
    // Built-in demo fixture: a confident query whose context policy copies
    // repeated answers, for out-of-the-box amplification curves.
    QuerySpec spec;
    spec.base = {{"London", 0.9}, {"Paris", 0.02}, {"Berlin", 0.02}};
    spec.policy = ContextPolicy::kCopier;
    spec.strength = 0.6;
    oracle->add_query("What is the capital of the UK?", std::move(spec));
    return oracle;
  }
  const auto& queries = config.at("oracle").at("queries");
  for (const auto& [query, body] : queries.items()) {
    QuerySpec spec;
    for (const auto& [text, prob] : body.at("base").items()) {
      spec.base.push_back({text, prob.get<double>()});
    }
    const std::string policy = body.value("policy", std::string("independent"));
    if (policy == "independent") {
      spec.policy = ContextPolicy::kIndependent;
    } else if (policy == "copier") {
      spec.policy = ContextPolicy::kCopier;
    } else if (policy == "sticky") {
      spec.policy = ContextPolicy::kSticky;
    } else {
      throw Error("oracle policy must be independent, copier, or sticky");
    }
    spec.strength = body.value("strength", 0.0);
    if (body.contains("conditional")) {
      for (const auto& [answer, table] : body.at("conditional").items()) {
        std::vector<ResponseSample> dist;
        for (const auto& [text, prob] : table.items()) {
          dist.push_back({text, prob.get<double>()});
        }
        spec.conditional[answer] = std::move(dist);
      }
    }
    oracle->add_query(query, std::move(spec));
  }
  return oracle;
}

std::unique_ptr<ConditionalModel> backend_from(const CommonOptions& common,
                                               const nlohmann::json& config) {
  if (common.backend == "synthetic") {
    auto oracle = oracle_from_config(config);
    return std::make_unique<SyntheticOracle>(*oracle);
  }
  if (common.backend == "http") {
    HttpBackendConfig http;
    if (config.contains("http")) {
      http = HttpBackendConfig::from_json(config.at("http").dump());
    }
    return std::make_unique<HttpBackend>(std::move(http));
  }
  throw Error("backend must be 'synthetic' or 'http'");
}

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--seed", common.seed, "Master seed");
  cmd->add_option("--out", common.out, "Output directory");
  cmd->add_option("--backend", common.backend,
                  "Backend: synthetic or http")
      ->check(CLI::IsMember({"synthetic", "http"}));
  cmd->add_option("--config", common.config_path,
                  "JSON config (http settings, oracle spec, defaults)");
  cmd->add_flag("--svg", common.svg, "Also render minimal SVG charts");
}

std::filesystem::path out_path(const CommonOptions& common,
                               const std::string& name) {
  return std::filesystem::path(common.out) / name;
}

void maybe_chart(const CommonOptions& common, const std::string& name,
                 const std::string& title, const std::string& x_label,
                 const std::string& y_label,
                 const std::vector<SvgSeries>& series, bool log_x) {
  if (!common.svg) return;
  write_text_file(out_path(common, name),
                  svg_line_chart(title, x_label, y_label, series, log_x));
}

int cmd_synth_convergence(const CommonOptions& common,
                          SynthConvergenceConfig config) {
  config.seed = common.seed;
  const auto rows = run_synth_convergence(config);
  write_text_file(out_path(common, "synth_convergence.csv"),
                  convergence_csv(rows));
  if (common.svg) {
    for (std::size_t n : config.arities) {
      for (double temp : config.temps) {
        SvgSeries estimate{"estimate", {}, {}};
        SvgSeries exact{"exact", {}, {}};
        for (const ConvergenceRow& row : rows) {
          if (row.n != n || row.temp != temp || row.rep != 0) continue;
          estimate.xs.push_back(static_cast<double>(row.k));
          estimate.ys.push_back(row.estimate);
          exact.xs.push_back(static_cast<double>(row.k));
          exact.ys.push_back(row.exact);
        }
        const std::string name = "synth_convergence_n" + std::to_string(n) +
                                 "_temp" + format_number(temp) + ".svg";
        maybe_chart(common, name,
                    "MI estimate vs exact (n=" + std::to_string(n) +
                        ", temp=" + format_number(temp) + ")",
                    "k", "nats", {estimate, exact}, false);
      }
    }
  }
  std::printf("wrote %s (%zu rows)\n",
              out_path(common, "synth_convergence.csv").c_str(), rows.size());
  return 0;
}

int cmd_missing_mass(const CommonOptions& common, MissingMassConfig config) {
  config.seed = common.seed;
  const auto rows = run_missing_mass(config);
  write_text_file(out_path(common, "missing_mass.csv"),
                  missing_mass_csv(rows, config));
  SvgSeries expected{"E[U_k]", {}, {}};
  SvgSeries finite{"finite bound", {}, {}};
  SvgSeries entropy_bound{"entropy bound", {}, {}};
  for (const MissingMassRow& row : rows) {
    expected.xs.push_back(static_cast<double>(row.k));
    expected.ys.push_back(row.expected);
    finite.xs.push_back(static_cast<double>(row.k));
    finite.ys.push_back(row.bound_finite);
    entropy_bound.xs.push_back(static_cast<double>(row.k));
    entropy_bound.ys.push_back(row.bound_entropy);
  }
  maybe_chart(common, "missing_mass.svg", "missing mass vs sample size", "k",
              "mass", {expected, finite, entropy_bound}, true);
  std::printf("wrote %s (%zu rows)\n",
              out_path(common, "missing_mass.csv").c_str(), rows.size());
  return 0;
}

int cmd_calibrate_evaluate(const CommonOptions& common,
                           const nlohmann::json& file_config,
                           CalibrateEvaluateConfig config,
                           const std::string& dataset_path,
                           bool filter_long_answers) {
  config.seed = common.seed;
  config.benchmark.seed = common.seed;
  const bool benchmark_mode = dataset_path.empty();
  const CalibrationOutcome outcome = [&] {
    if (benchmark_mode) return run_calibrate_evaluate(config);
    std::ifstream in(dataset_path);
    if (!in) throw Error("cannot open dataset: " + dataset_path);
    const auto records = read_jsonl_records(in, filter_long_answers);
    const auto model = backend_from(common, file_config);
    return run_calibrate_evaluate(config, records, *model);
  }();
  write_text_file(out_path(common, "calibration_metrics.csv"),
                  calibration_csv(outcome.stats));
  for (const auto& [kind, table] : outcome.scored) {
    const AbstentionPolicy policy =
        calibrate_threshold(table, kind, config.target_loss);
    write_text_file(
        out_path(common, std::string("scored_") + score_name(kind) + ".csv"),
        scored_to_csv(table, policy));
    const auto curve = pr_curve(table, kind);
    write_text_file(
        out_path(common, std::string("pr_") + score_name(kind) + ".csv"),
        pr_curve_to_csv(curve));
    if (common.svg) {
      SvgSeries series{score_name(kind), {}, {}};
      for (const PrPoint& p : curve) {
        series.xs.push_back(p.recall);
        series.ys.push_back(p.precision);
      }
      maybe_chart(common, std::string("pr_") + score_name(kind) + ".svg",
                  std::string("precision-recall: ") + score_name(kind),
                  "recall", "precision", {series}, false);
    }
  }
  if (benchmark_mode) {
    write_text_file(out_path(common, "benchmark_records.jsonl"), [&] {
      const SyntheticBenchmark bench = make_mixed_benchmark(config.benchmark);
      std::string lines;
      for (const QueryRecord& record : bench.records) {
        nlohmann::json j;
        j["query"] = record.query;
        j["answers"] = record.answers;
        j["tag"] = record.tag;
        lines += j.dump();
        lines += '\n';
      }
      return lines;
    }());
  }
  std::printf("wrote %s (+ scored/pr tables)\n",
              out_path(common, "calibration_metrics.csv").c_str());
  return 0;
}

int cmd_amplify(const CommonOptions& common, const nlohmann::json& config,
                AmplifyConfig amplify) {
  const auto model = backend_from(common, config);
  const std::string csv = amplify_csv(*model, amplify);
  write_text_file(out_path(common, "amplify.csv"), csv);
  if (common.svg) {
    SvgSeries series{"normalized target probability", {}, {}};
    for (const auto& p :
         amplification_curve(*model, amplify.query, amplify.target,
                             amplify.repeated, amplify.t_values)) {
      series.xs.push_back(static_cast<double>(p.t));
      series.ys.push_back(p.normalized_target_prob);
    }
    maybe_chart(common, "amplify.svg", "probability amplification",
                "repetitions", "normalized probability", {series}, false);
  }
  std::printf("wrote %s\n", out_path(common, "amplify.csv").c_str());
  return 0;
}

int cmd_attention_demo(const CommonOptions& common,
                       AttentionDemoConfig config) {
  config.seed = common.seed;
  const std::string csv = attention_demo_csv(config);
  write_text_file(out_path(common, "attention_demo.csv"), csv);
  if (common.svg) {
    SvgSeries mass{"y mass", {}, {}};
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      mass.xs.push_back(std::stod(line.substr(0, c1)));
      mass.ys.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    maybe_chart(common, "attention_demo.svg", "softmax mass on repeated rows",
                "t", "mass", {mass}, true);
  }
  std::printf("wrote %s\n", out_path(common, "attention_demo.csv").c_str());
  return 0;
}

/// Applies config-file defaults for the common options before parsing, so
/// flags still win.
void apply_config_defaults(const nlohmann::json& config,
                           CommonOptions& common) {
  if (config.contains("seed")) common.seed = config["seed"].get<std::uint64_t>();
  if (config.contains("out")) common.out = config["out"].get<std::string>();
  if (config.contains("backend")) {
    common.backend = config["backend"].get<std::string>();
  }
}

std::string peek_config_path(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CommonOptions common;
  nlohmann::json config;
  try {
    common.config_path = peek_config_path(argc, argv);
    config = load_config(common.config_path);
    apply_config_defaults(config, common);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }

  CLI::App app{
      "epimi: information-theoretic epistemic-uncertainty experiments for "
      "sequence models"};
  app.require_subcommand(1);

  SynthConvergenceConfig conv;
  auto* conv_cmd = app.add_subcommand(
      "synth-convergence",
      "MI estimator vs exact MI over the synthetic correlated-family grid");
  add_common(conv_cmd, common);
  conv_cmd->add_option("--n-grid", conv.arities, "Tuple arities")
      ->delimiter(',');
  conv_cmd->add_option("--temp-grid", conv.temps, "Temperatures")
      ->delimiter(',');
  conv_cmd->add_option("--k-min", conv.k_min, "Smallest sample size");
  conv_cmd->add_option("--k-max", conv.k_max, "Largest sample size");
  conv_cmd->add_option("--k-steps", conv.k_steps, "Grid points between them");
  conv_cmd->add_option("--reps", conv.repetitions, "Seeds per grid cell");

  MissingMassConfig mm;
  auto* mm_cmd = app.add_subcommand(
      "missing-mass", "Missing-mass bounds and Monte Carlo quantiles");
  add_common(mm_cmd, common);
  std::string family = "uniform";
  mm_cmd->add_option("--family", family, "uniform, zipf, or gibbs")
      ->check(CLI::IsMember({"uniform", "zipf", "gibbs"}));
  mm_cmd->add_option("--support", mm.support, "Support size (uniform/zipf)");
  mm_cmd->add_option("--alpha", mm.alpha, "Zipf exponent");
  mm_cmd->add_option("--gibbs-n", mm.gibbs_n, "Gibbs arity");
  mm_cmd->add_option("--gibbs-temp", mm.gibbs_temp, "Gibbs temperature");
  mm_cmd->add_option("--k-grid", mm.k_grid, "Sample sizes")->delimiter(',');
  mm_cmd->add_option("--trials", mm.trials, "Monte Carlo trials per k");
  mm_cmd->add_option("--delta", mm.delta, "Confidence parameter");

  CalibrateEvaluateConfig cal;
  std::string dataset_path;
  bool filter_long_answers = false;
  auto* cal_cmd = app.add_subcommand(
      "calibrate-evaluate",
      "Calibrate abstention thresholds on the mixed benchmark and evaluate");
  add_common(cal_cmd, common);
  cal_cmd->add_option("--dataset", dataset_path,
                      "JSON-lines dataset {query, answers, tag}; omitted = "
                      "synthetic benchmark");
  cal_cmd->add_flag("--filter-long", filter_long_answers,
                    "Drop records with accepted answers of 20+ characters");
  cal_cmd->add_option("--singles", cal.benchmark.single_queries,
                      "Single-answer queries");
  cal_cmd->add_option("--multis", cal.benchmark.multi_queries,
                      "Multi-answer queries");
  cal_cmd->add_option("--halluc-frac", cal.benchmark.hallucinated_fraction,
                      "Hallucinating fraction of the single-answer stratum");
  cal_cmd->add_option("--conf-wrong-frac",
                      cal.benchmark.confident_wrong_fraction,
                      "Confidently wrong fraction");
  cal_cmd->add_option("--copier-strength", cal.benchmark.copier_strength,
                      "Copier mixing weight for hallucinating queries");
  cal_cmd->add_option("--repetitions", cal.repetitions,
                      "Calibration/test resplits");
  cal_cmd->add_option("--target-loss", cal.target_loss,
                      "Calibration target error rate");
  cal_cmd->add_option("--k", cal.score_options.k, "Samples per query");
  cal_cmd->add_option("--temperature", cal.score_options.temperature,
                      "Sampling temperature");
  cal_cmd->add_option("--tau", cal.score_options.tau,
                      "Semantic match threshold");

  AmplifyConfig amp;
  auto* amp_cmd = app.add_subcommand(
      "amplify", "Normalized probability of a target answer under repetition");
  add_common(amp_cmd, common);
  amp_cmd->add_option("--query", amp.query, "Query text");
  amp_cmd->add_option("--target", amp.target, "Target answer");
  amp_cmd->add_option("--repeated", amp.repeated, "Answer repeated in-context");
  amp_cmd->add_option("--t-grid", amp.t_values, "Repetition counts")
      ->delimiter(',');

  AttentionDemoConfig att;
  auto* att_cmd = app.add_subcommand(
      "attention-demo", "Repetition experiment on a single attention head");
  add_common(att_cmd, common);
  att_cmd->add_option("--dprime", att.d_prime, "Input feature dimension d'");
  att_cmd->add_option("--d", att.d, "Projection dimension d");
  att_cmd->add_option("--t-grid", att.t_values, "Repetition counts")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv_cmd->parsed()) return cmd_synth_convergence(common, conv);
    if (mm_cmd->parsed()) {
      if (family == "zipf") mm.family = MissingMassFamily::kZipf;
      if (family == "gibbs") mm.family = MissingMassFamily::kGibbs;
      return cmd_missing_mass(common, mm);
    }
    if (cal_cmd->parsed()) {
      return cmd_calibrate_evaluate(common, config, cal, dataset_path,
                                    filter_long_answers);
    }
    if (amp_cmd->parsed()) {
      if (amp.query.empty()) {
        amp.query = "What is the capital of the UK?";
        amp.target = "London";
        amp.repeated = "Paris";
      }
      return cmd_amplify(common, config, amp);
    }
    if (att_cmd->parsed()) return cmd_attention_demo(common, att);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    err["command"] = app.get_subcommands().empty()
                         ? std::string("")
                         : app.get_subcommands().front()->get_name();
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
  return 0;
}
