// Command-line front end for linear bandit experiments.
//
//   linbandit run --config exp.ini [--seed N] [--reps N] [--out DIR] [--threads N]
//   linbandit equivalence --config exp.ini [--seeds N]
//   linbandit rates --config exp.ini [--reps N]
//   linbandit sweep --config exp.ini --param T|d|m|K --values v1 v2 ...

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linbandit/config.h"
#include "linbandit/errors.h"
#include "linbandit/harness.h"
#include "linbandit/output.h"

namespace fs = std::filesystem;
using namespace linbandit;

namespace {

void WarnOnSmallLambda(const ExperimentConfig& config) {
  if (config.policy.lambda < 1.0) {
    std::cerr << "warning: lambda = " << config.policy.lambda
              << " < 1; the elliptical-potential bound is only guaranteed for lambda >= 1\n";
  }
}

MonteCarloSummary RunAndEmit(const ExperimentConfig& config, const fs::path& out_dir,
                             const std::string& trace_name, const std::string& summary_name) {
  fs::create_directories(out_dir);
  const bool monitors = config.run.diagnostics != DiagnosticsLevel::kOff;
  std::optional<TraceWriter> writer;
  if (config.run.trace) writer.emplace(out_dir / trace_name, monitors);
  double wall = 0.0;
  const MonteCarloSummary summary = RunMonteCarlo(config, [&](const RunRecord& record) {
    wall += record.summary.wall_seconds;
    if (writer) writer->Append(record);
  });
  if (writer) writer->Close();
  WriteJsonFile(out_dir / summary_name, SummaryToJson(summary));
  std::cerr << "replication wall time (sum): " << wall << " s\n";
  return summary;
}

void PrintSummary(const MonteCarloSummary& summary) {
  std::printf("%10s %14s %14s %14s %14s\n", "t", "mean", "median", "q10", "q90");
  for (const auto& c : summary.checkpoints) {
    std::printf("%10ld %14.6g %14.6g %14.6g %14.6g\n", c.t, c.mean, c.median, c.q10, c.q90);
  }
  if (summary.resolved_ensemble_size >= 0) {
    std::printf("ensemble size m = %ld\n", summary.resolved_ensemble_size);
  }
  std::printf("perturbation scale = %.6g, theoretical bound R(T) <= %.6g\n",
              summary.resolved_scale, summary.theoretical_regret_bound);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear ensemble sampling and perturbed-history exploration experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> reps;
  std::optional<int> threads;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "Monte-Carlo regret study; writes trace CSV and summary JSON");
  run->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "base seed override");
  run->add_option("--reps", reps, "replication count override");
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--threads", threads, "worker threads override");

  int seeds = 50;
  auto* equivalence = app.add_subcommand("equivalence", "ensemble (m = T, round robin) vs LinPHE");
  equivalence->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  equivalence->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);

  long rate_reps = 1000;
  auto* rates = app.add_subcommand("rates", "empirical event rates of the concentration events");
  rates->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  rates->add_option("--reps", rate_reps, "replications (>= 100)");

  std::string param;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "repeat the run over one parameter");
  sweep->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "parameter to vary")->required()->check(CLI::IsMember({"T", "d", "m", "K"}));
  sweep->add_option("--values", values, "values to try")->required();
  sweep->add_option("--out", out_dir, "output directory override");
  sweep->add_option("--threads", threads, "worker threads override");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config = LoadConfig(config_path);
    if (seed) config.run.seed = *seed;
    if (reps) config.run.replications = *reps;
    if (threads) config.run.threads = *threads;
    if (!out_dir.empty()) config.run.out_dir = out_dir;
    config.Validate();
    WarnOnSmallLambda(config);

    if (*run) {
      const auto summary = RunAndEmit(config, config.run.out_dir, "trace.csv", "summary.json");
      PrintSummary(summary);
      return 0;
    }

    if (*equivalence) {
      const EquivalenceReport report = RunEquivalenceSuite(config, seeds);
      std::printf("%s: %d/%d seeds produced identical arm sequences\n",
                  report.passed ? "PASS" : "FAIL", report.matched, report.seeds);
      if (!report.passed) {
        std::printf("first divergence at seed %d, step %ld\n%s", report.failing_seed,
                    report.first_divergent_step, report.dump.c_str());
      }
      return report.passed ? 0 : 1;
    }

    if (*rates) {
      const RateReport report = EstimateEventRates(config, rate_reps);
      std::cout << RateReportToJson(report).dump(2) << '\n';
      return 0;
    }

    if (*sweep) {
      nlohmann::json table = nlohmann::json::array();
      for (const std::string& value : values) {
        ExperimentConfig variant = config;
        const std::string key = param == "T" ? "horizon" : param == "d" ? "dim"
                                : param == "m" ? "ensemble_size" : "arm_count";
        const std::string section = param == "T" ? "run" : param == "m" ? "policy" : "env";
        SetConfigValue(variant, section, key, value);
        variant.Validate();
        const auto summary = RunAndEmit(variant, config.run.out_dir, "sweep_" + param + "_" + value + ".csv",
                                        "sweep_" + param + "_" + value + ".json");
        const auto& last = summary.checkpoints.back();
        std::printf("%s = %-8s mean R(T) = %-12.6g median = %-12.6g bound = %.6g\n", param.c_str(),
                    value.c_str(), last.mean, last.median, summary.theoretical_regret_bound);
        table.push_back({{"param", param},
                         {"value", value},
                         {"horizon", last.t},
                         {"mean_regret", last.mean},
                         {"median_regret", last.median},
                         {"theoretical_regret_bound", summary.theoretical_regret_bound}});
      }
      WriteJsonFile(fs::path(config.run.out_dir) / ("sweep_" + param + ".json"), table);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
