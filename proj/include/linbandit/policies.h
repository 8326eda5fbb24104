#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "linbandit/environment.h"
#include "linbandit/gram.h"
#include "linbandit/keyed_random.h"
#include "linbandit/perturbation.h"

namespace linbandit {

struct Selection {
  int arm = 0;
  long model = -1;  // ensemble member used, -1 when not applicable
  // Estimator the arm is greedy for. For LinUCB this is the optimistic point
  // of the confidence ellipsoid in the direction of the chosen arm.
  Eigen::VectorXd theta;
};

// Common ridge backbone: every policy keeps V_t and the unperturbed
// sum_i X_i Y_i so the ridge estimator is observable at each step.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual Selection Select(const ArmSet& arms) = 0;
  virtual void Update(int arm_index, const Eigen::VectorXd& x, double reward) = 0;
  virtual std::string_view name() const = 0;

  // Perturbation vector (W / sqrt(lambda), Z_1, ..., Z_{t-1}) behind the most
  // recent selection. Only perturbation-based policies have one.
  virtual std::optional<Eigen::VectorXd> SelectedPerturbationVector() const {
    return std::nullopt;
  }

  const GramState& gram() const { return gram_; }
  const Eigen::VectorXd& ridge_sum() const { return ridge_sum_; }
  Eigen::VectorXd RidgeEstimate() const { return gram_.Solve(ridge_sum_); }

 protected:
  Policy(int dim, double lambda);
  void RecordObservation(const Eigen::VectorXd& x, double reward);

  GramState gram_;
  Eigen::VectorXd ridge_sum_;
};

// s += x (y + z). Shared by the ensemble and LinPHE so both accumulate
// perturbed rewards with identical rounding.
void AccumulatePerturbedReward(Eigen::VectorXd& s, const Eigen::VectorXd& x, double reward,
                               double perturbation);

enum class ModelSampler { kUniform, kRoundRobin };

// Linear ensemble sampling. m perturbed ridge estimators share one Gram
// matrix; S^j starts at W^j and absorbs x (y + Z^j) on every update.
class EnsembleSampling final : public Policy {
 public:
  // Throws std::invalid_argument when m < 1.
  EnsembleSampling(int dim, double lambda, long ensemble_size, PerturbationSpec spec,
                   PerturbationStream stream, ModelSampler sampler, RandomStream sampler_rng,
                   bool eager_refresh = false);

  // Samples j_t and plays argmax x^T theta^{j_t}. Round-robin uses j_t = t - 1
  // (0-based) and throws InvalidState once t > m.
  Selection Select(const ArmSet& arms) override;
  void Update(int arm_index, const Eigen::VectorXd& x, double reward) override;
  std::string_view name() const override { return "ensemble"; }
  std::optional<Eigen::VectorXd> SelectedPerturbationVector() const override;

  long ensemble_size() const { return static_cast<long>(s_vectors_.size()); }
  ModelSampler sampler() const { return sampler_; }
  long last_model() const { return last_model_; }
  const Eigen::VectorXd& s_vector(long j) const { return s_vectors_.at(j); }
  // Cached theta; current for every model only with eager refresh.
  const Eigen::VectorXd& cached_theta(long j) const { return thetas_.at(j); }
  Eigen::VectorXd Theta(long j) const { return gram_.Solve(s_vectors_.at(j)); }
  // theta^j - theta_hat, computed from sums without re-solving twice.
  Eigen::VectorXd PerturbationPart(long j) const;
  // (W^j / sqrt(lambda), Z_1^j, ..., Z_t^j) rebuilt from the keyed stream.
  Eigen::VectorXd PerturbationVector(long j) const;
  long pull_count(int arm) const;

 private:
  RewardKey KeyForStep(std::size_t step_index) const;

  PerturbationSpec spec_;
  PerturbationStream stream_;
  ModelSampler sampler_;
  RandomStream sampler_rng_;
  bool eager_refresh_;
  std::vector<Eigen::VectorXd> s_vectors_;
  std::vector<Eigen::VectorXd> thetas_;
  long last_model_ = -1;
  // Per executed step: arm index and that arm's pull count after the step.
  std::vector<int> step_arms_;
  std::vector<long> step_counts_;
  std::vector<long> arm_counts_;
};

// LinPHE. At step t draws a fresh W_t and fresh Z_{t,1..t-1} and refits the
// whole history. The draws for step t use model index t - 1, which is the
// member a round-robin ensemble would read at the same step.
class PerturbedHistory final : public Policy {
 public:
  PerturbedHistory(int dim, double lambda, PerturbationSpec spec, PerturbationStream stream);

  Selection Select(const ArmSet& arms) override;
  // Throws InvalidState unless t == history length + 1.
  Selection SelectAt(const ArmSet& arms, long t);
  void Update(int arm_index, const Eigen::VectorXd& x, double reward) override;
  std::string_view name() const override { return "phe"; }
  std::optional<Eigen::VectorXd> SelectedPerturbationVector() const override;

  // theta_t for the next step computed from stored history.
  Eigen::VectorXd PerturbedEstimate(long t) const;
  long history_length() const { return static_cast<long>(rewards_.size()); }
  const PerturbationStream& stream() const { return stream_; }

 private:
  RewardKey KeyForStep(std::size_t step_index) const;

  PerturbationSpec spec_;
  PerturbationStream stream_;
  std::vector<Eigen::VectorXd> arms_played_;
  std::vector<double> rewards_;
  std::vector<int> step_arms_;
  std::vector<long> step_counts_;
  std::vector<long> arm_counts_;
  long last_t_ = 0;
};

// LinUCB: argmax x^T theta_hat + beta ||x||_{V^{-1}}.
class LinUcb final : public Policy {
 public:
  // radius(t - 1) gives the bonus width used at step t.
  LinUcb(int dim, double lambda, std::function<double(long)> radius);

  Selection Select(const ArmSet& arms) override;
  void Update(int arm_index, const Eigen::VectorXd& x, double reward) override;
  std::string_view name() const override { return "linucb"; }

  static int SelectArm(const GramState& gram, const Eigen::VectorXd& theta_hat,
                       const ArmSet& arms, double beta);

 private:
  std::function<double(long)> radius_;
};

// Gaussian linear Thompson sampling: theta = theta_hat + V^{-1/2} xi with
// xi ~ N(0, scale^2 I). Note ||theta - theta_hat||_V = ||xi||_2.
class LinTs final : public Policy {
 public:
  LinTs(int dim, double lambda, double scale, RandomStream rng);

  Selection Select(const ArmSet& arms) override;
  void Update(int arm_index, const Eigen::VectorXd& x, double reward) override;
  std::string_view name() const override { return "lints"; }

  // Draws one sample; writes the isotropic draw to *xi when non-null.
  static Eigen::VectorXd SampleTheta(const GramState& gram, const Eigen::VectorXd& theta_hat,
                                     double scale, RandomStream& rng, Eigen::VectorXd* xi);

 private:
  double scale_;
  RandomStream rng_;
};

// Greedy ridge regression; the zero-exploration reference.
class GreedyRidge final : public Policy {
 public:
  GreedyRidge(int dim, double lambda);

  Selection Select(const ArmSet& arms) override;
  void Update(int arm_index, const Eigen::VectorXd& x, double reward) override;
  std::string_view name() const override { return "greedy"; }
};

}  // namespace linbandit
