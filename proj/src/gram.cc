#include "linbandit/gram.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "linbandit/errors.h"
#include "linbandit/tolerances.h"

namespace linbandit {

GramState::GramState(int dim, double lambda) : dim_(dim), lambda_(lambda) {
  if (dim < 1) throw std::invalid_argument("GramState: dim must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("GramState: lambda must be > 0");
  gram_ = lambda * Eigen::MatrixXd::Identity(dim, dim);
  gram_inv_ = (1.0 / lambda) * Eigen::MatrixXd::Identity(dim, dim);
}

void GramState::CheckDim(const Eigen::VectorXd& v) const {
  if (v.size() != dim_) {
    std::ostringstream msg;
    msg << "GramState: expected dimension " << dim_ << ", got " << v.size();
    throw std::invalid_argument(msg.str());
  }
}

void GramState::Update(const Eigen::VectorXd& x) {
  CheckDim(x);
  const double norm = x.norm();
  if (norm > 1.0 + kPreconditionSlack) {
    std::ostringstream msg;
    msg << "GramState: arm norm " << norm << " exceeds 1";
    throw DomainViolation(msg.str());
  }
  gram_.noalias() += x * x.transpose();
  const Eigen::VectorXd u = gram_inv_ * x;
  const double denom = 1.0 + x.dot(u);
  gram_inv_.noalias() -= (u * u.transpose()) / denom;
  ++step_count_;
  if (step_count_ % kReinvertPeriod == 0) Reinvert();
}

double GramState::WeightedNorm(const Eigen::VectorXd& v, Metric metric) const {
  CheckDim(v);
  const Eigen::MatrixXd& m = metric == Metric::kGram ? gram_ : gram_inv_;
  // SPD form; clamp rounding below zero.
  return std::sqrt(std::max(0.0, v.dot(m * v)));
}

Eigen::VectorXd GramState::Solve(const Eigen::VectorXd& b) const {
  CheckDim(b);
  return gram_inv_ * b;
}

double GramState::InverseDeviation() const {
  return (gram_ * gram_inv_ - Eigen::MatrixXd::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
}

void GramState::Reinvert() {
  Eigen::LLT<Eigen::MatrixXd> llt(gram_);
  gram_inv_ = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
  // Restore exact symmetry lost in the triangular solves.
  gram_inv_ = 0.5 * (gram_inv_ + gram_inv_.transpose()).eval();
}

}  // namespace linbandit
