#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Dense>

namespace linbandit {

// Inputs to the confidence radii. Validate() enforces sigma >= 0,
// lambda > 0, s_bound > 0, d >= 1, T >= 1 and 0 < delta <= 1.
struct ConfidenceParams {
  double sigma = 1.0;
  double lambda = 1.0;
  double s_bound = 1.0;
  int dim = 1;
  long horizon = 1;
  double delta = 0.1;

  void Validate() const;
};

// Ridge confidence radius
//   beta_t = sigma sqrt(d log(1 + t/(d lambda)) + 2 log(1/delta)) + sqrt(lambda) S.
double Beta(const ConfidenceParams& params, long t);

// Radius of the perturbation part of an ensemble estimator:
//   beta_T (sqrt(d log(1 + T/(d lambda)) + 2 log(2T/delta)) + sqrt(d) + sqrt(2 log(2T/delta)))
double GammaTilde(const ConfidenceParams& params);

// GammaTilde + beta_T; radius of the full perturbed estimator.
double GammaT(const ConfidenceParams& params);

// P(z >= 1) for a standard normal z.
double GaussianTailAtOne();

// ceil((8 / p_N^2)(K log T + log(1/delta))), at least 1.
long EnsembleSize(const ConfidenceParams& params, int arm_count);

enum class PerturbationFamily {
  kGaussian,
  kUniform,
  kRademacher,
  kSphericalComponentwise,
  kCenteredBinomial,
};

// Unit-normalized draw for a family, keyed by 64 bits. Every family is
// symmetric, 1-sub-Gaussian and has variance exactly 1:
//   kGaussian                N(0, 1)
//   kUniform                 Unif[-sqrt(3), sqrt(3)]
//   kRademacher              +-1
//   kSphericalComponentwise  sqrt(2) cos(2 pi U), one coordinate of a
//                            uniform point on the circle of radius sqrt(2)
//   kCenteredBinomial        sqrt(2) (Binomial(2, 1/2) - 1)
double UnitPerturbation(PerturbationFamily family, std::uint64_t key);

// Distribution of P_I / P_R. `scale` is the per-coordinate standard
// deviation (beta_T under AUTO). The anti-concentration pair (threshold c,
// floor p) guarantees P(u^T Z >= c ||u||) >= p for any fixed u.
struct PerturbationSpec {
  PerturbationFamily family = PerturbationFamily::kGaussian;
  double scale = 0.0;
  double anti_conc_threshold = 0.0;
  double anti_conc_floor = 0.0;

  // Fills in the anti-concentration pair: (scale, p_N) for Gaussian and
  // (scale / 3, 0.01) otherwise. Throws std::invalid_argument if scale < 0.
  static PerturbationSpec Make(PerturbationFamily family, double scale);
};

enum class Keying { kByStep, kByArmCount };

struct StepKey {
  long step;  // 1-based time step
};

struct ArmCountKey {
  int arm;     // 0-based arm index
  long count;  // 1-based pull count of that arm, including the current pull
};

using RewardKey = std::variant<StepKey, ArmCountKey>;

// Pure keyed source of perturbations. Draws depend only on (base_seed, key).
struct PerturbationStream {
  std::uint64_t base_seed = 0;
  Keying keying = Keying::kByStep;
};

// W^j with i.i.d. coordinates of standard deviation sqrt(lambda) * scale,
// keyed by (INIT, model, coordinate).
Eigen::VectorXd DrawInitial(const PerturbationSpec& spec, const PerturbationStream& stream,
                            long model, int dim, double lambda);

// Z with standard deviation `scale`, keyed by (STEP, model, t) or
// (ARM, model, k, N_k). Throws std::invalid_argument if the key kind does
// not match stream.keying.
double DrawRewardPerturbation(const PerturbationSpec& spec, const PerturbationStream& stream,
                              long model, const RewardKey& key);

}  // namespace linbandit
