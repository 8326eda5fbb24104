#pragma once

#include <Eigen/Dense>

namespace linbandit {

enum class Metric { kGram, kGramInv };

// Regularized Gram matrix V_t = lambda I + sum_i x_i x_i^T together with its
// inverse, kept in sync by rank-1 Sherman-Morrison updates. The inverse is
// rebuilt from V every kReinvertPeriod updates to bound drift.
class GramState {
 public:
  static constexpr long kReinvertPeriod = 1024;

  // Throws std::invalid_argument unless dim >= 1 and lambda > 0.
  GramState(int dim, double lambda);

  // V += x x^T. Throws std::invalid_argument on dimension mismatch and
  // DomainViolation when ||x||_2 > 1 + kPreconditionSlack. x = 0 is a valid
  // no-op update that still counts as a step.
  void Update(const Eigen::VectorXd& x);

  // sqrt(v^T M v) with M = V or V^{-1}.
  double WeightedNorm(const Eigen::VectorXd& v, Metric metric) const;

  // V^{-1} b.
  Eigen::VectorXd Solve(const Eigen::VectorXd& b) const;

  // max_ij |(V V^{-1} - I)_ij|.
  double InverseDeviation() const;

  // Recomputes V^{-1} from V by Cholesky.
  void Reinvert();

  int dim() const { return dim_; }
  double lambda() const { return lambda_; }
  long step_count() const { return step_count_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& gram_inv() const { return gram_inv_; }

 private:
  void CheckDim(const Eigen::VectorXd& v) const;

  int dim_;
  double lambda_;
  long step_count_ = 0;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd gram_inv_;
};

}  // namespace linbandit
