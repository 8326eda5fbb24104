#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "linbandit/errors.h"
#include "linbandit/gram.h"
#include "test_support.h"

namespace linbandit {
namespace {

using testing::RandomBallVector;
using testing::RandomGaussianVector;
using testing::RandomUnitVector;

TEST(GramState, InitIsScaledIdentity) {
  GramState a(2, 1.0);
  EXPECT_TRUE(a.gram().isApprox(Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_TRUE(a.gram_inv().isApprox(Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_EQ(a.step_count(), 0);

  GramState b(1, 4.0);
  EXPECT_DOUBLE_EQ(b.gram()(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(b.gram_inv()(0, 0), 0.25);

  GramState c(3, 0.5);
  EXPECT_TRUE(c.gram().isApprox(0.5 * Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_TRUE(c.gram_inv().isApprox(2.0 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST(GramState, RejectsBadConstruction) {
  EXPECT_THROW(GramState(0, 1.0), std::invalid_argument);
  EXPECT_THROW(GramState(-1, 1.0), std::invalid_argument);
  EXPECT_THROW(GramState(2, 0.0), std::invalid_argument);
  EXPECT_THROW(GramState(2, -1.0), std::invalid_argument);
}

TEST(GramState, AxisAlignedUpdate) {
  GramState g(2, 1.0);
  g.Update(Eigen::Vector2d(1.0, 0.0));
  EXPECT_DOUBLE_EQ(g.gram()(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(g.gram()(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(g.gram()(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(g.gram_inv()(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.gram_inv()(1, 1), 1.0);
  EXPECT_EQ(g.step_count(), 1);
}

TEST(GramState, InverseMatchesDirectInversion) {
  GramState g(2, 1.0);
  g.Update(Eigen::Vector2d(0.6, 0.8));
  const Eigen::MatrixXd direct = g.gram().inverse();
  EXPECT_LE((g.gram_inv() - direct).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GramState, HundredRandomUpdates) {
  std::mt19937_64 gen(7);
  const int d = 5;
  GramState g(d, 1.0);
  Eigen::MatrixXd batch = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = RandomUnitVector(gen, d);
    g.Update(x);
    batch += x * x.transpose();
  }
  EXPECT_LE((g.gram() - batch).cwiseAbs().maxCoeff(), 1e-10);
  const Eigen::MatrixXd product = g.gram_inv() * batch;
  EXPECT_LE((product - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((g.gram_inv() - batch.inverse()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GramState, LongRunCrossesReinversion) {
  std::mt19937_64 gen(3);
  const int d = 4;
  GramState g(d, 0.1);
  for (int i = 0; i < 3 * GramState::kReinvertPeriod + 5; ++i) g.Update(RandomBallVector(gen, d));
  EXPECT_LE(g.InverseDeviation(), 1e-8);
  EXPECT_LE((g.gram_inv() - g.gram().inverse()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GramState, UpdateErrors) {
  GramState g(2, 1.0);
  EXPECT_THROW(g.Update(Eigen::Vector3d(1, 0, 0)), std::invalid_argument);
  EXPECT_THROW(g.Update(Eigen::Vector2d(1.0 + 1e-6, 0.0)), DomainViolation);
  EXPECT_NO_THROW(g.Update(Eigen::Vector2d(1.0 + 1e-12, 0.0)));
  EXPECT_EQ(g.step_count(), 1);
}

TEST(GramState, ZeroUpdateCountsAsStep) {
  GramState g(3, 2.0);
  g.Update(Eigen::Vector3d::Zero());
  EXPECT_EQ(g.step_count(), 1);
  EXPECT_TRUE(g.gram().isApprox(2.0 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST(WeightedNorm, DiagonalCase) {
  GramState g(2, 1.0);
  g.Update(Eigen::Vector2d(1.0, 0.0));
  EXPECT_NEAR(g.WeightedNorm(Eigen::Vector2d(1, 0), Metric::kGramInv), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(g.WeightedNorm(Eigen::Vector2d(1, 0), Metric::kGram), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(g.WeightedNorm(Eigen::Vector2d::Zero(), Metric::kGram), 0.0);
  EXPECT_EQ(g.WeightedNorm(Eigen::Vector2d::Zero(), Metric::kGramInv), 0.0);
  EXPECT_THROW(g.WeightedNorm(Eigen::Vector3d::Zero(), Metric::kGram), std::invalid_argument);
}

TEST(WeightedNorm, MatchesLongDoubleEvaluation) {
  std::mt19937_64 gen(19);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 6;
    GramState g(d, 0.5 + trial * 0.1);
    for (int i = 0; i < 30; ++i) g.Update(RandomBallVector(gen, d));
    const Eigen::VectorXd v = RandomGaussianVector(gen, d);
    for (Metric metric : {Metric::kGram, Metric::kGramInv}) {
      const Eigen::MatrixXd& m = metric == Metric::kGram ? g.gram() : g.gram_inv();
      long double acc = 0.0L;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          acc += static_cast<long double>(v[i]) * static_cast<long double>(m(i, j)) *
                 static_cast<long double>(v[j]);
        }
      }
      const double oracle = static_cast<double>(std::sqrt(acc));
      EXPECT_NEAR(g.WeightedNorm(v, metric), oracle, 1e-10 * (1.0 + oracle));
    }
  }
}

TEST(Solve, IdentityAndDiagonal) {
  GramState g(2, 1.0);
  const Eigen::VectorXd s = g.Solve(Eigen::Vector2d(3.0, -2.0));
  EXPECT_DOUBLE_EQ(s[0], 3.0);
  EXPECT_DOUBLE_EQ(s[1], -2.0);
  g.Update(Eigen::Vector2d(1.0, 0.0));
  const Eigen::VectorXd r = g.Solve(Eigen::Vector2d(2.0, 3.0));
  EXPECT_NEAR(r[0], 1.0, 1e-15);
  EXPECT_NEAR(r[1], 3.0, 1e-15);
  EXPECT_THROW(g.Solve(Eigen::Vector3d::Zero()), std::invalid_argument);
}

TEST(Solve, MatchesPivotedDirectSolve) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 8;
    GramState g(d, 1.0);
    for (int i = 0; i < 50; ++i) g.Update(RandomBallVector(gen, d));
    const Eigen::VectorXd b = RandomGaussianVector(gen, d);
    const Eigen::VectorXd oracle = g.gram().fullPivLu().solve(b);
    EXPECT_LE((g.Solve(b) - oracle).norm(), 1e-9 * (1.0 + oracle.norm()));
  }
}

TEST(Reinvert, RestoresExactInverse) {
  std::mt19937_64 gen(5);
  GramState g(3, 1.0);
  for (int i = 0; i < 10; ++i) g.Update(RandomUnitVector(gen, 3));
  g.Reinvert();
  EXPECT_LE(g.InverseDeviation(), 1e-12);
  EXPECT_TRUE(g.gram_inv().isApprox(g.gram_inv().transpose(), 0.0));
}

}  // namespace
}  // namespace linbandit
