#include "linbandit/environment.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "linbandit/errors.h"
#include "linbandit/tolerances.h"

namespace linbandit {

int ArgmaxScore(const std::vector<double>& scores) {
  if (scores.empty()) throw std::invalid_argument("ArgmaxScore: empty score list");
  int best = 0;
  for (int k = 1; k < static_cast<int>(scores.size()); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

int ArgmaxArm(const ArmSet& arms, const Eigen::VectorXd& theta) {
  std::vector<double> scores;
  scores.reserve(arms.size());
  for (const auto& x : arms) scores.push_back(x.dot(theta));
  return ArgmaxScore(scores);
}

double NoiseModel::Draw(RandomStream& rng) const {
  switch (family) {
    case NoiseFamily::kGaussian:
      return sigma * rng.NextNormal();
    case NoiseFamily::kUniform:
      return sigma * (2.0 * rng.NextUniform() - 1.0);
    case NoiseFamily::kRademacher:
      return (rng.NextBits() >> 63) ? sigma : -sigma;
  }
  throw std::invalid_argument("NoiseModel: unknown family");
}

Environment::Environment(ArmSet arms, Eigen::VectorXd theta_star, NoiseModel noise,
                         double param_bound)
    : arms_(std::move(arms)),
      theta_star_(std::move(theta_star)),
      noise_(noise),
      param_bound_(param_bound) {
  if (arms_.empty()) throw std::invalid_argument("Environment: arm set is empty");
  if (theta_star_.size() < 1) throw std::invalid_argument("Environment: theta* is empty");
  if (!(param_bound_ > 0.0)) throw std::invalid_argument("Environment: S must be > 0");
  if (!(noise_.sigma >= 0.0)) throw std::invalid_argument("Environment: sigma must be >= 0");
  for (std::size_t k = 0; k < arms_.size(); ++k) {
    if (arms_[k].size() != theta_star_.size()) {
      std::ostringstream msg;
      msg << "Environment: arm " << k << " has dimension " << arms_[k].size() << ", expected "
          << theta_star_.size();
      throw std::invalid_argument(msg.str());
    }
    if (arms_[k].norm() > 1.0 + kPreconditionSlack) {
      std::ostringstream msg;
      msg << "Environment: arm " << k << " has norm " << arms_[k].norm() << " > 1";
      throw DomainViolation(msg.str());
    }
  }
  if (theta_star_.norm() > param_bound_ + kPreconditionSlack) {
    throw DomainViolation("Environment: ||theta*|| exceeds S");
  }
  const int index = ArgmaxArm(arms_, theta_star_);
  best_ = {index, arms_[index].dot(theta_star_)};
}

void Environment::CheckIndex(int arm_index) const {
  if (arm_index < 0 || arm_index >= arm_count()) {
    std::ostringstream msg;
    msg << "Environment: arm index " << arm_index << " out of range [0, " << arm_count() << ")";
    throw std::invalid_argument(msg.str());
  }
}

double Environment::MeanReward(int arm_index) const {
  CheckIndex(arm_index);
  return arms_[arm_index].dot(theta_star_);
}

double Environment::SampleReward(int arm_index, RandomStream& rng) const {
  const double mean = MeanReward(arm_index);
  return mean + noise_.Draw(rng);
}

namespace {

Eigen::VectorXd RandomDirection(int dim, RandomStream& rng) {
  Eigen::VectorXd v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.NextNormal();
  } while (v.norm() == 0.0);
  return v / v.norm();
}

}  // namespace

Environment MakeRandomEnvironment(int dim, int arm_count, double param_bound, NoiseModel noise,
                                  std::uint64_t seed) {
  if (dim < 1 || arm_count < 1) {
    throw std::invalid_argument("MakeRandomEnvironment: dim and arm count must be >= 1");
  }
  RandomStream rng(seed);
  ArmSet arms;
  arms.reserve(static_cast<std::size_t>(arm_count));
  for (int k = 0; k < arm_count; ++k) {
    const double radius = std::pow(rng.NextUniform(), 1.0 / dim);
    arms.push_back(radius * RandomDirection(dim, rng));
  }
  const double u = 0.5 + 0.5 * rng.NextUniform();
  Eigen::VectorXd theta = param_bound * u * RandomDirection(dim, rng);
  return Environment(std::move(arms), std::move(theta), noise, param_bound);
}

RegretLedger::RegretLedger(const Environment& env)
    : optimal_value_(env.best_arm().value), optimal_arm_index_(env.best_arm().index) {}

double RegretLedger::Record(const Environment& env, int arm_index) {
  const double regret = optimal_value_ - env.MeanReward(arm_index);
  per_step_.push_back(regret);
  cumulative_ += regret;
  return regret;
}

}  // namespace linbandit
