#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "linbandit/keyed_random.h"

namespace linbandit {

using ArmSet = std::vector<Eigen::VectorXd>;

// Index of the largest score; ties go to the smallest index.
int ArgmaxScore(const std::vector<double>& scores);

// argmax_k arms[k]^T theta with smallest-index ties.
int ArgmaxArm(const ArmSet& arms, const Eigen::VectorXd& theta);

enum class NoiseFamily { kGaussian, kUniform, kRademacher };

// Additive reward noise with sub-Gaussian proxy sigma.
//   kGaussian:   N(0, sigma^2)
//   kUniform:    Unif[-sigma, sigma]
//   kRademacher: +-sigma with probability 1/2 each
struct NoiseModel {
  NoiseFamily family = NoiseFamily::kGaussian;
  double sigma = 1.0;

  // Consumes exactly one draw from the stream.
  double Draw(RandomStream& rng) const;
};

struct BestArm {
  int index;
  double value;
};

// Finite-arm stochastic linear bandit. Immutable after construction.
class Environment {
 public:
  // Validates: K >= 1, all arms and theta_star share a dimension, ||x|| <= 1
  // for every arm, ||theta_star|| <= param_bound. Throws
  // std::invalid_argument on shape errors and DomainViolation on norm bounds.
  Environment(ArmSet arms, Eigen::VectorXd theta_star, NoiseModel noise, double param_bound);

  const ArmSet& arms() const { return arms_; }
  const Eigen::VectorXd& arm(int k) const { return arms_.at(static_cast<std::size_t>(k)); }
  const Eigen::VectorXd& theta_star() const { return theta_star_; }
  const NoiseModel& noise() const { return noise_; }
  double param_bound() const { return param_bound_; }
  int dim() const { return static_cast<int>(theta_star_.size()); }
  int arm_count() const { return static_cast<int>(arms_.size()); }

  BestArm best_arm() const { return best_; }
  double MeanReward(int arm_index) const;
  double SampleReward(int arm_index, RandomStream& rng) const;

 private:
  void CheckIndex(int arm_index) const;

  ArmSet arms_;
  Eigen::VectorXd theta_star_;
  NoiseModel noise_;
  double param_bound_;
  BestArm best_;
};

// Arms uniform in the unit ball; theta* uniform in direction with norm
// param_bound * u, u ~ Unif[0.5, 1]. Deterministic in seed.
Environment MakeRandomEnvironment(int dim, int arm_count, double param_bound, NoiseModel noise,
                                  std::uint64_t seed);

// Per-step and cumulative pseudo-regret against the hidden optimum.
class RegretLedger {
 public:
  explicit RegretLedger(const Environment& env);

  // Appends x*^T theta* - x_k^T theta*. Throws std::invalid_argument on a
  // bad index.
  double Record(const Environment& env, int arm_index);

  const std::vector<double>& per_step() const { return per_step_; }
  double cumulative() const { return cumulative_; }
  double optimal_value() const { return optimal_value_; }
  int optimal_arm_index() const { return optimal_arm_index_; }

 private:
  std::vector<double> per_step_;
  double cumulative_ = 0.0;
  double optimal_value_;
  int optimal_arm_index_;
};

}  // namespace linbandit
