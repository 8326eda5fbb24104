#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "linbandit/config.h"
#include "linbandit/environment.h"
#include "linbandit/policies.h"

namespace linbandit {

struct StepRecord {
  long t = 0;
  int arm = 0;
  long model = -1;
  double reward = 0.0;
  double instant_regret = 0.0;
  double cum_regret = 0.0;
  bool conc_ok = true;
  bool anticonc_ok = false;
  bool optimism_ok = false;
};

struct RunSummary {
  double final_regret = 0.0;
  double elliptical_sum = 0.0;
  double elliptical_bound = 0.0;  // 2 d log(1 + T / (d lambda))
  bool elliptical_ok = true;
  bool concentration_all_t = true;  // ridge concentration at every t in [0, T]
  long conc_ok_steps = 0;
  long anticonc_ok_steps = 0;
  long optimism_ok_steps = 0;
  long perturb_conc_ok_steps = 0;
  long monitored_steps = 0;
  bool monitors_passed = true;  // elliptical bound and all-t concentration
  double wall_seconds = 0.0;    // not part of any emitted file
};

struct RunRecord {
  long replication = 0;
  std::vector<StepRecord> steps;
  RunSummary summary;
};

// Environment described by the config. Random mode draws arms and theta*
// from DeriveSeed(env.seed, i, kEnvironment) with i = 0, or i = replication
// when env.resample is set.
Environment BuildEnvironment(const ExperimentConfig& config, long replication = 0);

// Fresh policy for one replication. Every stream is seeded by
// DeriveSeed(run.seed, replication, purpose).
std::unique_ptr<Policy> BuildPolicy(const ExperimentConfig& config, long replication);

// One full T-step interaction. Deterministic in (config, replication).
RunRecord RunReplication(const ExperimentConfig& config, const Environment& env, long replication);
// Builds the replication's environment first.
RunRecord RunReplication(const ExperimentConfig& config, long replication);

// Geometric grid 1, 2, 4, ... plus T.
std::vector<long> CheckpointGrid(long horizon);

struct CheckpointStats {
  long t = 0;
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

struct MonitorRates {
  double concentration_step = 0.0;
  double anticoncentration_step = 0.0;
  double optimism_step = 0.0;
  double perturb_concentration_step = 0.0;
  double concentration_all_t = 0.0;  // fraction of replications
  double elliptical_pass = 0.0;      // fraction of replications
  double monitors_pass = 0.0;        // fraction of replications
};

struct MonteCarloSummary {
  ExperimentConfig config;
  long replications = 0;
  long resolved_ensemble_size = -1;  // -1 unless the policy is an ensemble
  double resolved_scale = 0.0;
  double beta_T = 0.0;
  double gamma_T = 0.0;
  double optimism_probability = 0.0;  // p_N / 4
  double theoretical_regret_bound = 0.0;
  std::vector<CheckpointStats> checkpoints;
  MonitorRates monitor_rates;
};

// Linear-interpolation quantile (type 7) of an unsorted sample.
double Quantile(std::vector<double> sample, double q);

using RecordSink = std::function<void(const RunRecord&)>;

// Runs all replications on run.threads workers. Records reach `sink` and the
// aggregator in replication order, so the result does not depend on thread
// count.
MonteCarloSummary RunMonteCarlo(const ExperimentConfig& config, const RecordSink& sink = {});

struct EquivalenceReport {
  bool passed = false;
  int seeds = 0;
  int matched = 0;
  // First mismatch, if any.
  int failing_seed = -1;
  long first_divergent_step = -1;
  std::string dump;
};

// Ensemble sampling with m = T and round-robin model choice against LinPHE
// on a shared keyed perturbation stream, one environment instance per seed.
// `desynchronize` gives LinPHE a different stream (negative control).
EquivalenceReport RunEquivalenceSuite(const ExperimentConfig& config, int seeds = 50,
                                      bool desynchronize = false);

struct RateReport {
  long replications = 0;
  long horizon = 0;
  double delta = 0.0;
  double p_n = 0.0;
  // (a) ridge concentration at every t in [0, T]
  double concentration_all_t_rate = 0.0;
  double concentration_required = 0.0;  // 1 - delta - 3 sqrt(delta (1 - delta) / reps)
  // (b) ||theta_tilde^j_{t-1}||_{V_{t-1}} <= gamma_tilde_T over every (t, j)
  long perturb_samples = 0;
  double perturb_concentration_rate = 0.0;
  double perturb_required = 0.0;  // 1 - delta / T - 0.01
  // anti-concentration of the selected perturbation, per step
  long anticonc_samples = 0;
  double anticonc_rate = 0.0;
  // (c) fraction of runs whose ensemble average of I_t^j stays >= p_N / 4
  bool ensemble_fraction_applicable = false;  // ensemble policies only
  double ensemble_fraction_rate = 0.0;
  double ensemble_fraction_required = 0.0;  // 1 - delta
  double min_ensemble_fraction = 1.0;
  bool concentration_pass = false;
  bool perturb_pass = false;
  bool ensemble_fraction_pass = false;
};

// Event-rate study over `replications` runs. Throws std::invalid_argument
// when replications < 100.
RateReport EstimateEventRates(const ExperimentConfig& config, long replications);

}  // namespace linbandit
