#include "linbandit/diagnostics.h"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "linbandit/errors.h"

namespace linbandit {

namespace {

std::atomic<long> g_asserted_steps{0};

constexpr double kIdentityTol = 1e-9;

}  // namespace

long TotalAssertedSteps() { return g_asserted_steps.load(); }

Eigen::VectorXd OptimismDirection(const GramState& gram, const ArmSet& arm_history,
                                  const Eigen::VectorXd& x_star) {
  const int d = gram.dim();
  if (x_star.size() != d) throw std::invalid_argument("OptimismDirection: x* dimension mismatch");
  if (static_cast<long>(arm_history.size()) != gram.step_count()) {
    throw std::invalid_argument("OptimismDirection: history length differs from Gram step count");
  }
  const Eigen::VectorXd weighted = gram.Solve(x_star);
  Eigen::VectorXd u(d + static_cast<long>(arm_history.size()));
  u.head(d) = std::sqrt(gram.lambda()) * weighted;
  for (std::size_t i = 0; i < arm_history.size(); ++i) {
    if (arm_history[i].size() != d) {
      throw std::invalid_argument("OptimismDirection: arm dimension mismatch");
    }
    u[d + static_cast<long>(i)] = arm_history[i].dot(weighted);
  }
  return u;
}

bool CheckOptimismSufficiency(const Eigen::VectorXd& direction, const Eigen::VectorXd& perturbation,
                              double c, double ridge_dev) {
  if (direction.size() != perturbation.size()) {
    throw std::invalid_argument("CheckOptimismSufficiency: dimension mismatch");
  }
  return direction.dot(perturbation) >= c * direction.norm() && ridge_dev <= c;
}

double TheoreticalRegretBound(double gamma, double p, const ConfidenceParams& params) {
  params.Validate();
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("TheoreticalRegretBound: p must be in (0, 1]");
  if (!(gamma > 0.0)) throw std::invalid_argument("TheoreticalRegretBound: gamma must be > 0");
  const double d = params.dim;
  const double t = static_cast<double>(params.horizon);
  const double lambda = params.lambda;
  const double first = gamma * (1.0 + 2.0 / p) * std::sqrt(2.0 * d * t * std::log1p(t / (d * lambda)));
  const double second = (gamma / p) * std::sqrt((2.0 * t / lambda) * std::log(1.0 / params.delta));
  return first + second;
}

StepMonitor::StepMonitor(const Environment& env, const ConfidenceParams& params, bool full_trace)
    : env_(env), params_(params), full_trace_(full_trace), gamma_tilde_(GammaTilde(params)) {}

StepDiagnostics StepMonitor::Observe(const Policy& policy, const Selection& selection) {
  const GramState& gram = policy.gram();
  const long t_prev = gram.step_count();
  const Eigen::VectorXd& x_star = env_.arm(env_.best_arm().index);
  const Eigen::VectorXd& x_t = env_.arm(selection.arm);
  const Eigen::VectorXd& theta_star = env_.theta_star();

  StepDiagnostics diag;
  diag.beta_prev = Beta(params_, t_prev);

  const Eigen::VectorXd theta_hat = policy.RidgeEstimate();
  const double ridge_dev = gram.WeightedNorm(theta_hat - theta_star, Metric::kGram);
  diag.concentration_ok = ridge_dev <= diag.beta_prev;
  if (!diag.concentration_ok) all_concentration_ok_ = false;

  const Eigen::VectorXd theta_tilde = selection.theta - theta_hat;
  diag.perturb_concentration_ok = gram.WeightedNorm(theta_tilde, Metric::kGram) <= gamma_tilde_;

  const double projected = x_star.dot(theta_tilde);  // U^T Z
  const double u_norm = gram.WeightedNorm(x_star, Metric::kGramInv);
  diag.anti_conc_ok = projected >= diag.beta_prev * u_norm;

  const double optimal = x_star.dot(theta_star);
  const double chosen = x_t.dot(selection.theta);
  diag.optimism_ok = optimal <= chosen;

  if (full_trace_) {
    const Eigen::VectorXd u = OptimismDirection(gram, history_, x_star);
    if (std::abs(u.norm() - u_norm) > kIdentityTol * (1.0 + u_norm)) {
      std::ostringstream msg;
      msg << "step " << t_prev + 1 << ": ||U|| = " << u.norm() << " but ||x*||_{V^-1} = " << u_norm;
      throw InvariantViolation(msg.str());
    }
    if (const auto z = policy.SelectedPerturbationVector()) {
      const double lhs = u.dot(*z);
      if (std::abs(lhs - projected) > kIdentityTol * (1.0 + u.norm() * z->norm())) {
        std::ostringstream msg;
        msg << "step " << t_prev + 1 << ": U^T Z = " << lhs << " but x*^T theta_tilde = " << projected;
        throw InvariantViolation(msg.str());
      }
    }
    history_.push_back(x_t);
  }

  const double slack = kIdentityTol * (1.0 + std::abs(optimal) + std::abs(chosen));
  if (diag.anti_conc_ok && diag.concentration_ok && optimal > chosen + slack) {
    std::ostringstream msg;
    msg << "step " << t_prev + 1 << ": anti-concentration and ridge concentration hold but "
        << "x*^T theta* = " << optimal << " > X_t^T theta_t = " << chosen;
    throw InvariantViolation(msg.str());
  }

  const double width = gram.WeightedNorm(x_t, Metric::kGramInv);
  elliptical_sum_ += width * width;
  diag.elliptical_sum = elliptical_sum_;
  ++steps_checked_;
  g_asserted_steps.fetch_add(1, std::memory_order_relaxed);
  return diag;
}

bool RidgeConcentrationHolds(const Policy& policy, const Environment& env,
                             const ConfidenceParams& params) {
  const GramState& gram = policy.gram();
  const Eigen::VectorXd dev = policy.RidgeEstimate() - env.theta_star();
  return gram.WeightedNorm(dev, Metric::kGram) <= Beta(params, gram.step_count());
}

}  // namespace linbandit
