#pragma once

#include <vector>

#include <Eigen/Dense>

#include "linbandit/environment.h"
#include "linbandit/gram.h"
#include "linbandit/perturbation.h"
#include "linbandit/policies.h"

namespace linbandit {

// Event indicators for one step t, evaluated against V_{t-1} and the
// ridge estimator theta_hat_{t-1}.
struct StepDiagnostics {
  double beta_prev = 0.0;                 // beta_{t-1}
  bool concentration_ok = false;          // ||theta_hat - theta*||_V <= beta_{t-1}
  bool perturb_concentration_ok = false;  // ||theta_t - theta_hat||_V <= gamma_tilde_T
  bool anti_conc_ok = false;              // U^T Z >= beta_{t-1} ||U||
  bool optimism_ok = false;               // x*^T theta* <= X_t^T theta_t
  double elliptical_sum = 0.0;            // sum of ||X_s||^2_{V_{s-1}^{-1}} through step t
};

// U_{t-1} = (x*^T V^{-1} [sqrt(lambda) I, X_1, ..., X_{t-1}])^T, dimension
// d + t - 1. `gram` must be V_{t-1} built from exactly `arm_history`.
Eigen::VectorXd OptimismDirection(const GramState& gram, const ArmSet& arm_history,
                                  const Eigen::VectorXd& x_star);

// True iff U^T Z >= c ||U|| and ridge_dev <= c. Under both conditions the
// greedy arm of theta_hat + V^{-1} Phi Z is optimistic.
bool CheckOptimismSufficiency(const Eigen::VectorXd& direction, const Eigen::VectorXd& perturbation,
                              double c, double ridge_dev);

// gamma (1 + 2/p) sqrt(2 d T log(1 + T/(d lambda))) + (gamma / p) sqrt((2T / lambda) log(1/delta)).
double TheoreticalRegretBound(double gamma, double p, const ConfidenceParams& params);

// Per-step event monitor with simulator privilege (reads theta*).
//
// Anti-concentration is evaluated through the identity
// U^T Z = x*^T (theta_t - theta_hat) and ||U|| = ||x*||_{V^{-1}}. In full-trace
// mode U and Z are also materialized and the identities re-checked.
class StepMonitor {
 public:
  StepMonitor(const Environment& env, const ConfidenceParams& params, bool full_trace = false);

  // Call after policy.Select() and before policy.Update(). Throws
  // InvariantViolation if anti-concentration and ridge concentration hold
  // while the step is not optimistic, or if a full-trace identity fails.
  StepDiagnostics Observe(const Policy& policy, const Selection& selection);

  long steps_checked() const { return steps_checked_; }
  double elliptical_sum() const { return elliptical_sum_; }
  double gamma_tilde() const { return gamma_tilde_; }
  bool all_concentration_ok() const { return all_concentration_ok_; }

 private:
  const Environment& env_;
  ConfidenceParams params_;
  bool full_trace_;
  double gamma_tilde_;
  double elliptical_sum_ = 0.0;
  long steps_checked_ = 0;
  bool all_concentration_ok_ = true;
  ArmSet history_;
};

// Ridge concentration at the current state: ||theta_hat_t - theta*||_{V_t} <= beta_t.
bool RidgeConcentrationHolds(const Policy& policy, const Environment& env,
                             const ConfidenceParams& params);

// Process-wide count of steps on which the optimism implication was asserted.
long TotalAssertedSteps();

}  // namespace linbandit
