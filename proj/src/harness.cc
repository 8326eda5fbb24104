#include "linbandit/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "linbandit/diagnostics.h"
#include "linbandit/errors.h"
#include "linbandit/keyed_random.h"

namespace linbandit {

Environment BuildEnvironment(const ExperimentConfig& config, long replication) {
  const NoiseModel noise{config.env.noise, config.env.sigma};
  if (config.env.arm_mode == ArmMode::kExplicit) {
    return Environment(config.env.arm_list, config.env.theta_star, noise, config.env.s_bound);
  }
  return MakeRandomEnvironment(config.env.dim, config.env.arm_count, config.env.s_bound, noise,
                               DeriveSeed(config.env.seed,
                                          config.env.resample ? static_cast<std::uint64_t>(replication) : 0,
                                          StreamPurpose::kEnvironment));
}

std::unique_ptr<Policy> BuildPolicy(const ExperimentConfig& config, long replication) {
  const ConfidenceParams params = config.confidence();
  const int d = config.env.dim;
  const double lambda = config.policy.lambda;
  const std::uint64_t rep = static_cast<std::uint64_t>(replication);
  const std::uint64_t seed = config.run.seed;
  switch (config.policy.kind) {
    case PolicyKind::kEnsemble:
    case PolicyKind::kPhe: {
      const auto spec = PerturbationSpec::Make(config.policy.perturbation, config.ResolvedScale());
      const PerturbationStream stream{DeriveSeed(seed, rep, StreamPurpose::kPerturbation),
                                      config.policy.keying};
      if (config.policy.kind == PolicyKind::kPhe) {
        return std::make_unique<PerturbedHistory>(d, lambda, spec, stream);
      }
      return std::make_unique<EnsembleSampling>(
          d, lambda, config.ResolvedEnsembleSize(), spec, stream, config.policy.sampler,
          RandomStream(DeriveSeed(seed, rep, StreamPurpose::kSampler)), config.policy.eager_refresh);
    }
    case PolicyKind::kLinUcb: {
      std::function<double(long)> radius;
      if (config.policy.ucb_radius) {
        radius = [r = *config.policy.ucb_radius](long) { return r; };
      } else {
        radius = [params](long t) { return Beta(params, t); };
      }
      return std::make_unique<LinUcb>(d, lambda, std::move(radius));
    }
    case PolicyKind::kLinTs: {
      const double scale = config.policy.ts_scale ? *config.policy.ts_scale : Beta(params, params.horizon);
      return std::make_unique<LinTs>(d, lambda, scale,
                                     RandomStream(DeriveSeed(seed, rep, StreamPurpose::kThompson)));
    }
    case PolicyKind::kGreedy:
      return std::make_unique<GreedyRidge>(d, lambda);
  }
  throw ConfigError("unknown policy kind");
}

RunRecord RunReplication(const ExperimentConfig& config, const Environment& env, long replication) {
  const auto start = std::chrono::steady_clock::now();
  if (env.dim() != config.env.dim) {
    throw ConfigError("environment dimension " + std::to_string(env.dim()) +
                      " differs from policy dimension " + std::to_string(config.env.dim));
  }
  const ConfidenceParams params = config.confidence();
  auto policy = BuildPolicy(config, replication);
  RandomStream noise(DeriveSeed(config.run.seed, static_cast<std::uint64_t>(replication),
                                StreamPurpose::kNoise));
  RegretLedger ledger(env);

  const bool monitored = config.run.diagnostics != DiagnosticsLevel::kOff;
  std::unique_ptr<StepMonitor> monitor;
  if (monitored) {
    monitor = std::make_unique<StepMonitor>(
        env, params, config.run.diagnostics == DiagnosticsLevel::kFullTrace);
  }

  RunRecord record;
  record.replication = replication;
  record.steps.reserve(static_cast<std::size_t>(config.run.horizon));
  RunSummary& summary = record.summary;
  double elliptical = 0.0;

  for (long t = 1; t <= config.run.horizon; ++t) {
    const Selection selection = policy->Select(env.arms());
    StepRecord step;
    step.t = t;
    step.arm = selection.arm;
    step.model = selection.model;
    if (monitor) {
      const StepDiagnostics diag = monitor->Observe(*policy, selection);
      step.conc_ok = diag.concentration_ok;
      step.anticonc_ok = diag.anti_conc_ok;
      step.optimism_ok = diag.optimism_ok;
      summary.conc_ok_steps += diag.concentration_ok;
      summary.anticonc_ok_steps += diag.anti_conc_ok;
      summary.optimism_ok_steps += diag.optimism_ok;
      summary.perturb_conc_ok_steps += diag.perturb_concentration_ok;
      ++summary.monitored_steps;
      if (!diag.concentration_ok) summary.concentration_all_t = false;
    }
    const Eigen::VectorXd& x = env.arm(selection.arm);
    const double width = policy->gram().WeightedNorm(x, Metric::kGramInv);
    elliptical += width * width;
    step.reward = env.SampleReward(selection.arm, noise);
    step.instant_regret = ledger.Record(env, selection.arm);
    step.cum_regret = ledger.cumulative();
    policy->Update(selection.arm, x, step.reward);
    record.steps.push_back(step);
  }
  if (monitored && !RidgeConcentrationHolds(*policy, env, params)) {
    summary.concentration_all_t = false;
  }

  const double d = config.env.dim;
  summary.final_regret = ledger.cumulative();
  summary.elliptical_sum = elliptical;
  summary.elliptical_bound =
      2.0 * d * std::log1p(static_cast<double>(config.run.horizon) / (d * config.policy.lambda));
  summary.elliptical_ok = elliptical <= summary.elliptical_bound;
  summary.monitors_passed =
      (config.policy.lambda < 1.0 || summary.elliptical_ok) && summary.concentration_all_t;
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

RunRecord RunReplication(const ExperimentConfig& config, long replication) {
  return RunReplication(config, BuildEnvironment(config, replication), replication);
}

std::vector<long> CheckpointGrid(long horizon) {
  std::vector<long> grid;
  for (long t = 1; t < horizon; t *= 2) grid.push_back(t);
  grid.push_back(horizon);
  return grid;
}

double Quantile(std::vector<double> sample, double q) {
  if (sample.empty()) throw std::invalid_argument("Quantile: empty sample");
  std::sort(sample.begin(), sample.end());
  const double h = (static_cast<double>(sample.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sample.size()) return sample.back();
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[lo + 1] - sample[lo]);
}

namespace {

// Runs replications on a worker pool and hands finished records to
// `consume` strictly in replication order. At most `capacity` records are
// buffered ahead of the consumer.
void ForEachReplicationOrdered(const ExperimentConfig& config, const Environment& env,
                               const std::function<void(RunRecord&&)>& consume) {
  const bool resample = config.env.resample && config.env.arm_mode == ArmMode::kRandom;
  auto run_one = [&](long i) {
    return resample ? RunReplication(config, i) : RunReplication(config, env, i);
  };
  const long n = config.run.replications;
  const int threads = config.run.threads;
  if (threads <= 1) {
    for (long i = 0; i < n; ++i) consume(run_one(i));
    return;
  }

  const long capacity = 4L * threads;
  std::mutex mu;
  std::condition_variable cv;
  std::map<long, RunRecord> ready;
  long next_index = 0;
  long consumed = 0;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      long i = 0;
      {
        std::unique_lock lock(mu);
        if (error || next_index >= n) return;
        i = next_index++;
        cv.wait(lock, [&] { return error || i < consumed + capacity; });
        if (error) return;
      }
      try {
        RunRecord record = run_one(i);
        std::lock_guard lock(mu);
        ready.emplace(i, std::move(record));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int k = 0; k < threads; ++k) pool.emplace_back(worker);

  for (long i = 0; i < n; ++i) {
    RunRecord record;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return error || ready.contains(i); });
      if (error) break;
      record = std::move(ready.at(i));
      ready.erase(i);
      consumed = i + 1;
    }
    cv.notify_all();
    try {
      consume(std::move(record));
    } catch (...) {
      std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
      cv.notify_all();
      break;
    }
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

MonteCarloSummary RunMonteCarlo(const ExperimentConfig& config, const RecordSink& sink) {
  config.Validate();
  const Environment env = BuildEnvironment(config);
  const ConfidenceParams params = config.confidence();
  const std::vector<long> grid = CheckpointGrid(config.run.horizon);
  std::vector<std::vector<double>> at_checkpoint(grid.size());

  long conc = 0, anticonc = 0, optimism = 0, perturb = 0, monitored = 0;
  long all_t = 0, elliptical = 0, passed = 0;

  ForEachReplicationOrdered(config, env, [&](RunRecord&& record) {
    if (sink) sink(record);
    for (std::size_t c = 0; c < grid.size(); ++c) {
      at_checkpoint[c].push_back(record.steps[static_cast<std::size_t>(grid[c] - 1)].cum_regret);
    }
    const RunSummary& s = record.summary;
    conc += s.conc_ok_steps;
    anticonc += s.anticonc_ok_steps;
    optimism += s.optimism_ok_steps;
    perturb += s.perturb_conc_ok_steps;
    monitored += s.monitored_steps;
    all_t += s.concentration_all_t;
    elliptical += s.elliptical_ok;
    passed += s.monitors_passed;
  });

  MonteCarloSummary summary;
  summary.config = config;
  summary.replications = config.run.replications;
  if (config.policy.kind == PolicyKind::kEnsemble) {
    summary.resolved_ensemble_size = config.ResolvedEnsembleSize();
  }
  summary.resolved_scale = config.ResolvedScale();
  summary.beta_T = Beta(params, params.horizon);
  summary.gamma_T = GammaT(params);
  summary.optimism_probability = GaussianTailAtOne() / 4.0;
  summary.theoretical_regret_bound =
      TheoreticalRegretBound(summary.gamma_T, summary.optimism_probability, params);

  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto& values = at_checkpoint[c];
    double total = 0.0;
    for (double v : values) total += v;
    CheckpointStats stats;
    stats.t = grid[c];
    stats.mean = total / static_cast<double>(values.size());
    stats.median = Quantile(values, 0.5);
    stats.q10 = Quantile(values, 0.1);
    stats.q90 = Quantile(values, 0.9);
    summary.checkpoints.push_back(stats);
  }

  const double reps = static_cast<double>(config.run.replications);
  auto step_rate = [&](long count) {
    return monitored > 0 ? static_cast<double>(count) / static_cast<double>(monitored) : 0.0;
  };
  summary.monitor_rates.concentration_step = step_rate(conc);
  summary.monitor_rates.anticoncentration_step = step_rate(anticonc);
  summary.monitor_rates.optimism_step = step_rate(optimism);
  summary.monitor_rates.perturb_concentration_step = step_rate(perturb);
  summary.monitor_rates.concentration_all_t =
      monitored > 0 ? static_cast<double>(all_t) / reps : 0.0;
  summary.monitor_rates.elliptical_pass = static_cast<double>(elliptical) / reps;
  summary.monitor_rates.monitors_pass = static_cast<double>(passed) / reps;
  return summary;
}

namespace {

std::string DumpDivergence(int seed, long t, const Selection& es, const Selection& phe,
                           const EnsembleSampling& es_state, const PerturbedHistory& phe_state) {
  std::ostringstream out;
  out << std::setprecision(17);
  const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", "; ", "", "", "[", "]");
  out << "seed " << seed << ", step " << t << ": ensemble arm " << es.arm << " (model " << es.model
      << "), phe arm " << phe.arm << "\n";
  out << "  ensemble theta " << es.theta.transpose().format(fmt) << "\n";
  out << "  phe theta      " << phe.theta.transpose().format(fmt) << "\n";
  out << "  ensemble V     " << es_state.gram().gram().format(fmt) << "\n";
  out << "  phe V          " << phe_state.gram().gram().format(fmt) << "\n";
  return out.str();
}

}  // namespace

EquivalenceReport RunEquivalenceSuite(const ExperimentConfig& config, int seeds, bool desynchronize) {
  config.Validate();
  EquivalenceReport report;
  report.seeds = seeds;
  const long horizon = config.run.horizon;
  const int d = config.env.dim;
  const double lambda = config.policy.lambda;
  const auto spec = PerturbationSpec::Make(config.policy.perturbation, config.ResolvedScale());
  const NoiseModel noise{config.env.noise, config.env.sigma};

  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = static_cast<std::uint64_t>(s);
    const Environment env =
        config.env.arm_mode == ArmMode::kExplicit
            ? BuildEnvironment(config)
            : MakeRandomEnvironment(d, config.env.arm_count, config.env.s_bound, noise,
                                    DeriveSeed(config.env.seed, seed, StreamPurpose::kEnvironment));
    const PerturbationStream stream{DeriveSeed(config.run.seed, seed, StreamPurpose::kPerturbation),
                                    config.policy.keying};
    PerturbationStream phe_stream = stream;
    if (desynchronize) phe_stream.base_seed = Mix64(stream.base_seed);

    EnsembleSampling ensemble(d, lambda, horizon, spec, stream, ModelSampler::kRoundRobin,
                              RandomStream(DeriveSeed(config.run.seed, seed, StreamPurpose::kSampler)));
    PerturbedHistory phe(d, lambda, spec, phe_stream);
    RandomStream es_noise(DeriveSeed(config.run.seed, seed, StreamPurpose::kNoise));
    RandomStream phe_noise(DeriveSeed(config.run.seed, seed, StreamPurpose::kNoise));

    bool matched = true;
    for (long t = 1; t <= horizon; ++t) {
      const Selection a = ensemble.Select(env.arms());
      const Selection b = phe.SelectAt(env.arms(), t);
      if (a.arm != b.arm) {
        matched = false;
        if (report.failing_seed < 0) {
          report.failing_seed = s;
          report.first_divergent_step = t;
          report.dump = DumpDivergence(s, t, a, b, ensemble, phe);
        }
        break;
      }
      ensemble.Update(a.arm, env.arm(a.arm), env.SampleReward(a.arm, es_noise));
      phe.Update(b.arm, env.arm(b.arm), env.SampleReward(b.arm, phe_noise));
    }
    report.matched += matched;
  }
  report.passed = report.matched == seeds;
  return report;
}

RateReport EstimateEventRates(const ExperimentConfig& config, long replications) {
  if (replications < 100) throw std::invalid_argument("EstimateEventRates: need >= 100 replications");
  config.Validate();
  const ConfidenceParams params = config.confidence();
  const double gamma_tilde = GammaTilde(params);

  RateReport report;
  report.replications = replications;
  report.horizon = config.run.horizon;
  report.delta = config.policy.delta;
  report.p_n = GaussianTailAtOne();
  report.ensemble_fraction_applicable = config.policy.kind == PolicyKind::kEnsemble;

  long runs_concentrated = 0, runs_fraction_ok = 0;
  long perturb_ok = 0, anticonc_ok = 0;

  for (long r = 0; r < replications; ++r) {
    const Environment env = BuildEnvironment(config, r);
    const Eigen::VectorXd& x_star = env.arm(env.best_arm().index);
    auto policy = BuildPolicy(config, r);
    auto* ensemble = dynamic_cast<EnsembleSampling*>(policy.get());
    RandomStream noise(DeriveSeed(config.run.seed, static_cast<std::uint64_t>(r), StreamPurpose::kNoise));
    StepMonitor monitor(env, params, config.run.diagnostics == DiagnosticsLevel::kFullTrace);
    bool concentrated = RidgeConcentrationHolds(*policy, env, params);
    double min_fraction = 1.0;

    for (long t = 1; t <= config.run.horizon; ++t) {
      if (ensemble != nullptr) {
        const GramState& gram = ensemble->gram();
        const double threshold = Beta(params, t - 1) * gram.WeightedNorm(x_star, Metric::kGramInv);
        long indicators = 0;
        for (long j = 0; j < ensemble->ensemble_size(); ++j) {
          const Eigen::VectorXd tilde = ensemble->PerturbationPart(j);
          const bool small = gram.WeightedNorm(tilde, Metric::kGram) <= gamma_tilde;
          const bool anti = x_star.dot(tilde) >= threshold;
          perturb_ok += small;
          indicators += small && anti;
          ++report.perturb_samples;
        }
        min_fraction = std::min(min_fraction, static_cast<double>(indicators) /
                                                  static_cast<double>(ensemble->ensemble_size()));
      }
      const Selection selection = policy->Select(env.arms());
      const StepDiagnostics diag = monitor.Observe(*policy, selection);
      if (ensemble == nullptr) {
        perturb_ok += diag.perturb_concentration_ok;
        ++report.perturb_samples;
      }
      anticonc_ok += diag.anti_conc_ok;
      ++report.anticonc_samples;
      const Eigen::VectorXd& x = env.arm(selection.arm);
      policy->Update(selection.arm, x, env.SampleReward(selection.arm, noise));
      concentrated = concentrated && RidgeConcentrationHolds(*policy, env, params);
    }
    runs_concentrated += concentrated;
    runs_fraction_ok += min_fraction >= report.p_n / 4.0;
    if (ensemble != nullptr) report.min_ensemble_fraction = std::min(report.min_ensemble_fraction, min_fraction);
  }

  const double reps = static_cast<double>(replications);
  const double delta = report.delta;
  report.concentration_all_t_rate = static_cast<double>(runs_concentrated) / reps;
  report.concentration_required = 1.0 - delta - 3.0 * std::sqrt(delta * (1.0 - delta) / reps);
  report.perturb_concentration_rate =
      static_cast<double>(perturb_ok) / static_cast<double>(report.perturb_samples);
  report.perturb_required = 1.0 - delta / static_cast<double>(report.horizon) - 0.01;
  report.anticonc_rate = static_cast<double>(anticonc_ok) / static_cast<double>(report.anticonc_samples);
  report.ensemble_fraction_required = 1.0 - delta;
  report.concentration_pass = report.concentration_all_t_rate >= report.concentration_required;
  report.perturb_pass = report.perturb_concentration_rate >= report.perturb_required;
  if (report.ensemble_fraction_applicable) {
    report.ensemble_fraction_rate = static_cast<double>(runs_fraction_ok) / reps;
    report.ensemble_fraction_pass = report.ensemble_fraction_rate >= report.ensemble_fraction_required;
  }
  return report;
}

}  // namespace linbandit
