#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "linbandit/diagnostics.h"
#include "linbandit/environment.h"
#include "linbandit/errors.h"
#include "linbandit/policies.h"
#include "test_support.h"

namespace linbandit {
namespace {

ConfidenceParams Params(double sigma, int d, long horizon, double delta, double lambda = 1.0) {
  ConfidenceParams p;
  p.sigma = sigma;
  p.dim = d;
  p.horizon = horizon;
  p.delta = delta;
  p.lambda = lambda;
  p.s_bound = 1.0;
  return p;
}

// Phi = [sqrt(lambda) I, X_1, ..., X_n] built directly from the history.
Eigen::MatrixXd Phi(const ArmSet& history, int d, double lambda) {
  Eigen::MatrixXd phi(d, d + static_cast<long>(history.size()));
  phi.leftCols(d) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(d, d);
  for (std::size_t i = 0; i < history.size(); ++i) phi.col(d + static_cast<long>(i)) = history[i];
  return phi;
}

TEST(OptimismDirection, EmptyHistory) {
  GramState g(3, 1.0);
  const Eigen::VectorXd u = OptimismDirection(g, {}, Eigen::Vector3d(1, 0, 0));
  EXPECT_EQ(u, Eigen::VectorXd(Eigen::Vector3d(1, 0, 0)));
  EXPECT_EQ(u.norm(), 1.0);
}

TEST(OptimismDirection, NormIdentity) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 4;
    const double lambda = 0.5 + trial;
    GramState g(d, lambda);
    ArmSet history;
    for (int i = 0; i < 3 * trial; ++i) {
      history.push_back(testing::RandomBallVector(gen, d));
      g.Update(history.back());
    }
    const Eigen::VectorXd x = testing::RandomUnitVector(gen, d);
    const Eigen::VectorXd u = OptimismDirection(g, history, x);
    EXPECT_NEAR(u.norm(), g.WeightedNorm(x, Metric::kGramInv), 1e-9);
    const Eigen::MatrixXd direct = Phi(history, d, lambda).transpose() * g.gram().inverse() * x;
    EXPECT_LE((u - direct).norm(), 1e-9);
  }
}

TEST(OptimismDirection, InnerProductIdentity) {
  std::mt19937_64 gen(4);
  const int d = 3;
  const double lambda = 2.0;
  GramState g(d, lambda);
  ArmSet history;
  for (int i = 0; i < 5; ++i) {
    history.push_back(testing::RandomBallVector(gen, d));
    g.Update(history.back());
  }
  const Eigen::VectorXd x = testing::RandomUnitVector(gen, d);
  const Eigen::VectorXd u = OptimismDirection(g, history, x);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd z = testing::RandomGaussianVector(gen, d + 5);
    // theta_tilde = V^{-1}(W + sum_i X_i Z_i) with W = sqrt(lambda) z_head.
    const Eigen::VectorXd tilde = g.gram().inverse() * (Phi(history, d, lambda) * z);
    EXPECT_NEAR(u.dot(z), x.dot(tilde), 1e-9 * (1.0 + u.norm() * z.norm()));
  }
}

TEST(OptimismDirection, Errors) {
  GramState g(2, 1.0);
  g.Update(Eigen::Vector2d(1, 0));
  EXPECT_THROW(OptimismDirection(g, {}, Eigen::Vector2d(1, 0)), std::invalid_argument);
  EXPECT_THROW(OptimismDirection(g, {Eigen::Vector2d(1, 0)}, Eigen::Vector3d(1, 0, 0)),
               std::invalid_argument);
  EXPECT_THROW(OptimismDirection(g, {Eigen::Vector3d(1, 0, 0)}, Eigen::Vector2d(1, 0)),
               std::invalid_argument);
}

TEST(CheckOptimismSufficiency, Examples) {
  const Eigen::Vector3d u(1.0, -2.0, 0.5);
  const double c = 1.3;
  const Eigen::VectorXd z = c * u / u.norm() * (1.0 + 1e-6);
  EXPECT_TRUE(CheckOptimismSufficiency(u, z, c, c / 2.0));
  EXPECT_FALSE(CheckOptimismSufficiency(u, Eigen::Vector3d::Zero(), c, 0.0));
  EXPECT_FALSE(CheckOptimismSufficiency(u, z, c, 2.0 * c));
  EXPECT_THROW(CheckOptimismSufficiency(u, Eigen::Vector2d(1, 1), c, 0.0), std::invalid_argument);
}

// Every Z on an 11^3 grid that passes the sufficiency check in a live d=2,
// t=2 state yields an optimistic greedy step.
TEST(CheckOptimismSufficiency, ExhaustiveGridInLiveState) {
  std::mt19937_64 gen(9);
  int total_true = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Environment env = MakeRandomEnvironment(2, 6, 1.0, NoiseModel{NoiseFamily::kGaussian, 0.1}, seed);
    const ConfidenceParams params = Params(0.1, 2, 10, 0.1);
    GreedyRidge policy(2, 1.0);
    RandomStream noise(seed);
    const int first = static_cast<int>(gen() % 6);
    policy.Update(first, env.arm(first), env.SampleReward(first, noise));
    const ArmSet history{env.arm(first)};
    const GramState& g = policy.gram();
    const Eigen::VectorXd& x_star = env.arm(env.best_arm().index);
    const Eigen::VectorXd u = OptimismDirection(g, history, x_star);
    const double c = Beta(params, 1);
    const Eigen::VectorXd hat = policy.RidgeEstimate();
    const double ridge_dev = g.WeightedNorm(hat - env.theta_star(), Metric::kGram);
    const Eigen::MatrixXd phi = Phi(history, 2, 1.0);
    const Eigen::MatrixXd v_inv = g.gram().inverse();
    for (int a = 0; a < 11; ++a) {
      for (int b = 0; b < 11; ++b) {
        for (int e = 0; e < 11; ++e) {
          const Eigen::Vector3d z(-5.0 + a, -5.0 + b, -5.0 + e);
          if (!CheckOptimismSufficiency(u, z, c, ridge_dev)) continue;
          ++total_true;
          const Eigen::VectorXd theta = hat + v_inv * (phi * z);
          const int chosen = ArgmaxArm(env.arms(), theta);
          EXPECT_LE(env.best_arm().value, env.arm(chosen).dot(theta) + 1e-12);
        }
      }
    }
  }
  EXPECT_GT(total_true, 0);
}

TEST(TheoreticalRegretBound, DeltaOneDropsSecondTerm) {
  const double value = TheoreticalRegretBound(1.0, 1.0, Params(1.0, 1, 1, 1.0));
  const long double oracle = 3.0L * std::sqrt(2.0L * std::log(2.0L));
  EXPECT_NEAR(value, static_cast<double>(oracle), 1e-12);
}

TEST(TheoreticalRegretBound, ClosedForm) {
  const ConfidenceParams p = Params(1.0, 3, 4000, 0.1, 2.0);
  const long double gamma = 7.5L, prob = 0.04L;
  const long double first =
      gamma * (1.0L + 2.0L / prob) * std::sqrt(2.0L * 3.0L * 4000.0L * std::log(1.0L + 4000.0L / 6.0L));
  const long double second = (gamma / prob) * std::sqrt((2.0L * 4000.0L / 2.0L) * std::log(10.0L));
  EXPECT_NEAR(TheoreticalRegretBound(7.5, 0.04, p), static_cast<double>(first + second),
              1e-9 * static_cast<double>(first + second));
}

TEST(TheoreticalRegretBound, Errors) {
  const ConfidenceParams p = Params(1.0, 2, 10, 0.1);
  EXPECT_THROW(TheoreticalRegretBound(1.0, 0.0, p), std::invalid_argument);
  EXPECT_THROW(TheoreticalRegretBound(1.0, 1.5, p), std::invalid_argument);
  EXPECT_THROW(TheoreticalRegretBound(0.0, 0.5, p), std::invalid_argument);
}

TEST(StepMonitor, HarmonicEllipticalSum) {
  const Environment env({Eigen::VectorXd::Ones(1)}, Eigen::VectorXd::Constant(1, 0.5),
                        NoiseModel{NoiseFamily::kGaussian, 0.0}, 1.0);
  const ConfidenceParams params = Params(0.0, 1, 3, 0.1);
  GreedyRidge policy(1, 1.0);
  StepMonitor monitor(env, params);
  RandomStream noise(1);
  for (int t = 0; t < 3; ++t) {
    const Selection s = policy.Select(env.arms());
    monitor.Observe(policy, s);
    policy.Update(s.arm, env.arm(s.arm), env.SampleReward(s.arm, noise));
  }
  EXPECT_NEAR(monitor.elliptical_sum(), 11.0 / 6.0, 1e-14);
  EXPECT_EQ(monitor.steps_checked(), 3);
}

TEST(StepMonitor, NoiselessDegenerateRun) {
  const Environment env = MakeRandomEnvironment(3, 8, 1.0, NoiseModel{NoiseFamily::kGaussian, 0.0}, 2);
  const ConfidenceParams params = Params(0.0, 3, 200, 0.1);
  EnsembleSampling policy(3, 1.0, 4, PerturbationSpec::Make(PerturbationFamily::kGaussian, 0.0),
                          PerturbationStream{1, Keying::kByStep}, ModelSampler::kUniform, RandomStream(2));
  StepMonitor monitor(env, params, true);
  RandomStream noise(3);
  for (int t = 0; t < 200; ++t) {
    const Selection s = policy.Select(env.arms());
    const StepDiagnostics diag = monitor.Observe(policy, s);
    EXPECT_TRUE(diag.concentration_ok);
    EXPECT_TRUE(diag.perturb_concentration_ok);
    policy.Update(s.arm, env.arm(s.arm), env.SampleReward(s.arm, noise));
  }
  EXPECT_TRUE(monitor.all_concentration_ok());
}

TEST(StepMonitor, FullRunRespectsEllipticalBound) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const int d = 2 + static_cast<int>(seed);
    const long horizon = 300;
    const Environment env = MakeRandomEnvironment(d, 10, 1.0, NoiseModel{}, seed);
    const ConfidenceParams params = Params(1.0, d, horizon, 0.1);
    PerturbedHistory policy(d, 1.0, PerturbationSpec::Make(PerturbationFamily::kGaussian, Beta(params, horizon)),
                            PerturbationStream{seed, Keying::kByStep});
    StepMonitor monitor(env, params, true);
    RandomStream noise(seed);
    for (long t = 0; t < horizon; ++t) {
      const Selection s = policy.Select(env.arms());
      monitor.Observe(policy, s);
      policy.Update(s.arm, env.arm(s.arm), env.SampleReward(s.arm, noise));
    }
    EXPECT_LE(monitor.elliptical_sum(), 2.0 * d * std::log(1.0 + static_cast<double>(horizon) / d));
  }
}

// A selection that is not greedy for its own theta breaks the implication,
// and the monitor must report it.
TEST(StepMonitor, DetectsInconsistentSelection) {
  const Environment env({Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)}, Eigen::Vector2d(0.9, 0.0),
                        NoiseModel{NoiseFamily::kGaussian, 0.0}, 1.0);
  const ConfidenceParams params = Params(0.0, 2, 10, 0.1);
  GreedyRidge policy(2, 1.0);
  StepMonitor monitor(env, params);
  Selection bogus;
  bogus.arm = 1;
  bogus.theta = Eigen::Vector2d(50.0, -1.0);
  EXPECT_THROW(monitor.Observe(policy, bogus), InvariantViolation);
}

TEST(StepMonitor, AssertedStepCounterAdvances) {
  const Environment env = MakeRandomEnvironment(2, 4, 1.0, NoiseModel{}, 1);
  GreedyRidge policy(2, 1.0);
  StepMonitor monitor(env, Params(1.0, 2, 5, 0.1));
  const long before = TotalAssertedSteps();
  monitor.Observe(policy, policy.Select(env.arms()));
  EXPECT_EQ(TotalAssertedSteps(), before + 1);
}

TEST(RidgeConcentration, AllTimeFrequency) {
  const ConfidenceParams params = Params(1.0, 2, 50, 0.5);
  const int reps = 2000;
  int held = 0;
  std::mt19937_64 gen(5);
  for (int r = 0; r < reps; ++r) {
    const Environment env = MakeRandomEnvironment(2, 5, 1.0, NoiseModel{}, static_cast<std::uint64_t>(r));
    GreedyRidge policy(2, 1.0);
    RandomStream noise(static_cast<std::uint64_t>(r) + 7777);
    bool ok = RidgeConcentrationHolds(policy, env, params);
    for (long t = 0; t < 50; ++t) {
      const int k = static_cast<int>(gen() % 5);
      policy.Update(k, env.arm(k), env.SampleReward(k, noise));
      ok = ok && RidgeConcentrationHolds(policy, env, params);
    }
    held += ok;
  }
  EXPECT_GE(static_cast<double>(held) / reps, 0.5 - 0.03);
}

// With Z scale equal to beta_{t-1}, P(U^T Z >= beta_{t-1} ||U||) is the
// Gaussian tail at one.
TEST(AntiConcentration, GaussianRateAtFixedHistory) {
  std::mt19937_64 gen(11);
  const Environment env = MakeRandomEnvironment(3, 6, 1.0, NoiseModel{}, 4);
  const ConfidenceParams params = Params(1.0, 3, 100, 0.1);
  const double c = Beta(params, 5);
  const long m = 40000;
  EnsembleSampling es(3, 1.0, m, PerturbationSpec::Make(PerturbationFamily::kGaussian, c),
                      PerturbationStream{3, Keying::kByStep}, ModelSampler::kUniform, RandomStream(1));
  RandomStream noise(2);
  for (int t = 0; t < 5; ++t) {
    const int k = static_cast<int>(gen() % 6);
    es.Update(k, env.arm(k), env.SampleReward(k, noise));
  }
  const Eigen::VectorXd& x_star = env.arm(env.best_arm().index);
  const double threshold = c * es.gram().WeightedNorm(x_star, Metric::kGramInv);
  long hits = 0;
  for (long j = 0; j < m; ++j) hits += x_star.dot(es.PerturbationPart(j)) >= threshold;
  EXPECT_NEAR(static_cast<double>(hits) / m, GaussianTailAtOne(), 0.01);
}

}  // namespace
}  // namespace linbandit
