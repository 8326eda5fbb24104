#include "linbandit/policies.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "linbandit/errors.h"

namespace linbandit {

namespace {

void CheckArms(const ArmSet& arms, int dim) {
  if (arms.empty()) throw std::invalid_argument("policy: arm set is empty");
  for (const auto& x : arms) {
    if (x.size() != dim) throw std::invalid_argument("policy: arm dimension mismatch");
  }
}

}  // namespace

Policy::Policy(int dim, double lambda)
    : gram_(dim, lambda), ridge_sum_(Eigen::VectorXd::Zero(dim)) {}

void Policy::RecordObservation(const Eigen::VectorXd& x, double reward) {
  gram_.Update(x);
  ridge_sum_ += x * reward;
}

void AccumulatePerturbedReward(Eigen::VectorXd& s, const Eigen::VectorXd& x, double reward,
                               double perturbation) {
  s += x * (reward + perturbation);
}

// --- EnsembleSampling -------------------------------------------------------

EnsembleSampling::EnsembleSampling(int dim, double lambda, long ensemble_size,
                                   PerturbationSpec spec, PerturbationStream stream,
                                   ModelSampler sampler, RandomStream sampler_rng,
                                   bool eager_refresh)
    : Policy(dim, lambda),
      spec_(spec),
      stream_(stream),
      sampler_(sampler),
      sampler_rng_(sampler_rng),
      eager_refresh_(eager_refresh) {
  if (ensemble_size < 1) throw std::invalid_argument("EnsembleSampling: m must be >= 1");
  s_vectors_.reserve(static_cast<std::size_t>(ensemble_size));
  thetas_.reserve(static_cast<std::size_t>(ensemble_size));
  for (long j = 0; j < ensemble_size; ++j) {
    s_vectors_.push_back(DrawInitial(spec_, stream_, j, dim, lambda));
    thetas_.push_back(gram_.Solve(s_vectors_.back()));
  }
}

Selection EnsembleSampling::Select(const ArmSet& arms) {
  CheckArms(arms, gram_.dim());
  const long t = gram_.step_count() + 1;
  long j = 0;
  if (sampler_ == ModelSampler::kRoundRobin) {
    if (t > ensemble_size()) {
      std::ostringstream msg;
      msg << "EnsembleSampling: round-robin step " << t << " exceeds ensemble size "
          << ensemble_size();
      throw InvalidState(msg.str());
    }
    j = t - 1;
  } else {
    j = static_cast<long>(sampler_rng_.NextIndex(static_cast<std::uint64_t>(ensemble_size())));
  }
  thetas_[j] = gram_.Solve(s_vectors_[j]);
  last_model_ = j;
  return {ArgmaxArm(arms, thetas_[j]), j, thetas_[j]};
}

RewardKey EnsembleSampling::KeyForStep(std::size_t step_index) const {
  if (stream_.keying == Keying::kByStep) return StepKey{static_cast<long>(step_index) + 1};
  return ArmCountKey{step_arms_[step_index], step_counts_[step_index]};
}

void EnsembleSampling::Update(int arm_index, const Eigen::VectorXd& x, double reward) {
  if (x.size() != gram_.dim()) throw std::invalid_argument("EnsembleSampling: dimension mismatch");
  if (arm_index < 0) throw std::invalid_argument("EnsembleSampling: negative arm index");
  RecordObservation(x, reward);
  if (static_cast<std::size_t>(arm_index) >= arm_counts_.size()) {
    arm_counts_.resize(static_cast<std::size_t>(arm_index) + 1, 0);
  }
  step_arms_.push_back(arm_index);
  step_counts_.push_back(++arm_counts_[arm_index]);
  const RewardKey key = KeyForStep(step_arms_.size() - 1);
  for (long j = 0; j < ensemble_size(); ++j) {
    const double z = DrawRewardPerturbation(spec_, stream_, j, key);
    AccumulatePerturbedReward(s_vectors_[j], x, reward, z);
  }
  if (eager_refresh_) {
    for (long j = 0; j < ensemble_size(); ++j) thetas_[j] = gram_.Solve(s_vectors_[j]);
  }
}

Eigen::VectorXd EnsembleSampling::PerturbationPart(long j) const {
  return gram_.Solve(s_vectors_.at(j) - ridge_sum_);
}

Eigen::VectorXd EnsembleSampling::PerturbationVector(long j) const {
  const int d = gram_.dim();
  const std::size_t steps = step_arms_.size();
  Eigen::VectorXd z(d + static_cast<long>(steps));
  z.head(d) = DrawInitial(spec_, stream_, j, d, gram_.lambda()) / std::sqrt(gram_.lambda());
  for (std::size_t i = 0; i < steps; ++i) {
    z[d + static_cast<long>(i)] = DrawRewardPerturbation(spec_, stream_, j, KeyForStep(i));
  }
  return z;
}

std::optional<Eigen::VectorXd> EnsembleSampling::SelectedPerturbationVector() const {
  if (last_model_ < 0) return std::nullopt;
  return PerturbationVector(last_model_);
}

long EnsembleSampling::pull_count(int arm) const {
  if (arm < 0 || static_cast<std::size_t>(arm) >= arm_counts_.size()) return 0;
  return arm_counts_[arm];
}

// --- PerturbedHistory -------------------------------------------------------

PerturbedHistory::PerturbedHistory(int dim, double lambda, PerturbationSpec spec,
                                   PerturbationStream stream)
    : Policy(dim, lambda), spec_(spec), stream_(stream) {}

RewardKey PerturbedHistory::KeyForStep(std::size_t step_index) const {
  if (stream_.keying == Keying::kByStep) return StepKey{static_cast<long>(step_index) + 1};
  return ArmCountKey{step_arms_[step_index], step_counts_[step_index]};
}

Eigen::VectorXd PerturbedHistory::PerturbedEstimate(long t) const {
  const long model = t - 1;
  Eigen::VectorXd s = DrawInitial(spec_, stream_, model, gram_.dim(), gram_.lambda());
  for (std::size_t i = 0; i < rewards_.size(); ++i) {
    const double z = DrawRewardPerturbation(spec_, stream_, model, KeyForStep(i));
    AccumulatePerturbedReward(s, arms_played_[i], rewards_[i], z);
  }
  return gram_.Solve(s);
}

Selection PerturbedHistory::SelectAt(const ArmSet& arms, long t) {
  CheckArms(arms, gram_.dim());
  if (t != history_length() + 1) {
    std::ostringstream msg;
    msg << "PerturbedHistory: step " << t << " does not follow history of length "
        << history_length();
    throw InvalidState(msg.str());
  }
  Eigen::VectorXd theta = PerturbedEstimate(t);
  last_t_ = t;
  const int arm = ArgmaxArm(arms, theta);
  return {arm, -1, std::move(theta)};
}

Selection PerturbedHistory::Select(const ArmSet& arms) {
  return SelectAt(arms, history_length() + 1);
}

void PerturbedHistory::Update(int arm_index, const Eigen::VectorXd& x, double reward) {
  if (x.size() != gram_.dim()) throw std::invalid_argument("PerturbedHistory: dimension mismatch");
  if (arm_index < 0) throw std::invalid_argument("PerturbedHistory: negative arm index");
  RecordObservation(x, reward);
  if (static_cast<std::size_t>(arm_index) >= arm_counts_.size()) {
    arm_counts_.resize(static_cast<std::size_t>(arm_index) + 1, 0);
  }
  arms_played_.push_back(x);
  rewards_.push_back(reward);
  step_arms_.push_back(arm_index);
  step_counts_.push_back(++arm_counts_[arm_index]);
}

std::optional<Eigen::VectorXd> PerturbedHistory::SelectedPerturbationVector() const {
  if (last_t_ != history_length() + 1) return std::nullopt;
  const int d = gram_.dim();
  const long model = last_t_ - 1;
  Eigen::VectorXd z(d + history_length());
  z.head(d) = DrawInitial(spec_, stream_, model, d, gram_.lambda()) / std::sqrt(gram_.lambda());
  for (std::size_t i = 0; i < rewards_.size(); ++i) {
    z[d + static_cast<long>(i)] = DrawRewardPerturbation(spec_, stream_, model, KeyForStep(i));
  }
  return z;
}

// --- LinUcb -----------------------------------------------------------------

LinUcb::LinUcb(int dim, double lambda, std::function<double(long)> radius)
    : Policy(dim, lambda), radius_(std::move(radius)) {}

int LinUcb::SelectArm(const GramState& gram, const Eigen::VectorXd& theta_hat,
                      const ArmSet& arms, double beta) {
  std::vector<double> scores;
  scores.reserve(arms.size());
  for (const auto& x : arms) {
    scores.push_back(x.dot(theta_hat) + beta * gram.WeightedNorm(x, Metric::kGramInv));
  }
  return ArgmaxScore(scores);
}

Selection LinUcb::Select(const ArmSet& arms) {
  CheckArms(arms, gram_.dim());
  const double beta = radius_(gram_.step_count());
  const Eigen::VectorXd theta_hat = RidgeEstimate();
  const int arm = SelectArm(gram_, theta_hat, arms, beta);
  // Optimistic point of the ellipsoid {||theta - theta_hat||_V <= beta} in
  // the chosen direction, so that x_t^T theta equals the UCB score.
  Eigen::VectorXd theta = theta_hat;
  const double width = gram_.WeightedNorm(arms[arm], Metric::kGramInv);
  if (width > 0.0 && beta != 0.0) theta += (beta / width) * gram_.Solve(arms[arm]);
  return {arm, -1, std::move(theta)};
}

void LinUcb::Update(int, const Eigen::VectorXd& x, double reward) {
  RecordObservation(x, reward);
}

// --- LinTs ------------------------------------------------------------------

LinTs::LinTs(int dim, double lambda, double scale, RandomStream rng)
    : Policy(dim, lambda), scale_(scale), rng_(rng) {
  if (!(scale >= 0.0)) throw std::invalid_argument("LinTs: scale must be >= 0");
}

Eigen::VectorXd LinTs::SampleTheta(const GramState& gram, const Eigen::VectorXd& theta_hat,
                                   double scale, RandomStream& rng, Eigen::VectorXd* xi) {
  const int d = gram.dim();
  Eigen::VectorXd draw(d);
  for (int i = 0; i < d; ++i) draw[i] = scale * rng.NextNormal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram.gram());
  const Eigen::MatrixXd inv_sqrt = eig.eigenvectors() *
                                   eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                   eig.eigenvectors().transpose();
  if (xi != nullptr) *xi = draw;
  return theta_hat + inv_sqrt * draw;
}

Selection LinTs::Select(const ArmSet& arms) {
  CheckArms(arms, gram_.dim());
  Eigen::VectorXd theta = SampleTheta(gram_, RidgeEstimate(), scale_, rng_, nullptr);
  const int arm = ArgmaxArm(arms, theta);
  return {arm, -1, std::move(theta)};
}

void LinTs::Update(int, const Eigen::VectorXd& x, double reward) { RecordObservation(x, reward); }

// --- GreedyRidge ------------------------------------------------------------

GreedyRidge::GreedyRidge(int dim, double lambda) : Policy(dim, lambda) {}

Selection GreedyRidge::Select(const ArmSet& arms) {
  CheckArms(arms, gram_.dim());
  Eigen::VectorXd theta = RidgeEstimate();
  const int arm = ArgmaxArm(arms, theta);
  return {arm, -1, std::move(theta)};
}

void GreedyRidge::Update(int, const Eigen::VectorXd& x, double reward) {
  RecordObservation(x, reward);
}

}  // namespace linbandit
