#include "linbandit/perturbation.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "linbandit/keyed_random.h"

namespace linbandit {

namespace {

constexpr std::uint64_t kInitTag = 0x494e4954ULL;  // "INIT"
constexpr std::uint64_t kStepTag = 0x53544550ULL;  // "STEP"
constexpr std::uint64_t kArmTag = 0x41524d4bULL;   // "ARMK"

}  // namespace

void ConfidenceParams::Validate() const {
  if (!(sigma >= 0.0)) throw std::invalid_argument("ConfidenceParams: sigma must be >= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("ConfidenceParams: lambda must be > 0");
  if (!(s_bound > 0.0)) throw std::invalid_argument("ConfidenceParams: S must be > 0");
  if (dim < 1) throw std::invalid_argument("ConfidenceParams: d must be >= 1");
  if (horizon < 1) throw std::invalid_argument("ConfidenceParams: T must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("ConfidenceParams: delta must be in (0, 1]");
  }
}

double Beta(const ConfidenceParams& p, long t) {
  p.Validate();
  if (t < 0) throw std::invalid_argument("Beta: t must be >= 0");
  const double d = p.dim;
  const double inner = d * std::log1p(static_cast<double>(t) / (d * p.lambda)) +
                       2.0 * std::log(1.0 / p.delta);
  return p.sigma * std::sqrt(inner) + std::sqrt(p.lambda) * p.s_bound;
}

double GammaTilde(const ConfidenceParams& p) {
  const double beta_t = Beta(p, p.horizon);
  const double d = p.dim;
  const double t = static_cast<double>(p.horizon);
  const double log_term = std::log(2.0 * t / p.delta);
  return beta_t * (std::sqrt(d * std::log1p(t / (d * p.lambda)) + 2.0 * log_term) +
                   std::sqrt(d) + std::sqrt(2.0 * log_term));
}

double GammaT(const ConfidenceParams& p) { return GammaTilde(p) + Beta(p, p.horizon); }

double GaussianTailAtOne() { return 0.5 * std::erfc(1.0 / std::numbers::sqrt2); }

long EnsembleSize(const ConfidenceParams& p, int arm_count) {
  p.Validate();
  if (arm_count < 1) throw std::invalid_argument("EnsembleSize: K must be >= 1");
  const double p_n = GaussianTailAtOne();
  const double raw = (8.0 / (p_n * p_n)) *
                     (arm_count * std::log(static_cast<double>(p.horizon)) +
                      std::log(1.0 / p.delta));
  const long m = static_cast<long>(std::ceil(raw));
  return m < 1 ? 1 : m;
}

double UnitPerturbation(PerturbationFamily family, std::uint64_t key) {
  switch (family) {
    case PerturbationFamily::kGaussian:
      return StandardNormalAt(key);
    case PerturbationFamily::kUniform:
      return std::sqrt(3.0) * (2.0 * UnitInterval(Mix64(key)) - 1.0);
    case PerturbationFamily::kRademacher:
      return (Mix64(key) >> 63) ? 1.0 : -1.0;
    case PerturbationFamily::kSphericalComponentwise:
      return std::numbers::sqrt2 * std::cos(2.0 * std::numbers::pi * UnitInterval(Mix64(key)));
    case PerturbationFamily::kCenteredBinomial: {
      const std::uint64_t bits = Mix64(key);
      const int successes = static_cast<int>(bits >> 63) + static_cast<int>((bits >> 62) & 1U);
      return std::numbers::sqrt2 * static_cast<double>(successes - 1);
    }
  }
  throw std::invalid_argument("UnitPerturbation: unknown family");
}

PerturbationSpec PerturbationSpec::Make(PerturbationFamily family, double scale) {
  if (!(scale >= 0.0)) throw std::invalid_argument("PerturbationSpec: scale must be >= 0");
  PerturbationSpec spec;
  spec.family = family;
  spec.scale = scale;
  if (family == PerturbationFamily::kGaussian) {
    spec.anti_conc_threshold = scale;
    spec.anti_conc_floor = GaussianTailAtOne();
  } else {
    spec.anti_conc_threshold = scale / 3.0;
    spec.anti_conc_floor = 0.01;
  }
  return spec;
}

Eigen::VectorXd DrawInitial(const PerturbationSpec& spec, const PerturbationStream& stream,
                            long model, int dim, double lambda) {
  const double sd = std::sqrt(lambda) * spec.scale;
  Eigen::VectorXd w(dim);
  for (int i = 0; i < dim; ++i) {
    const std::uint64_t key = HashKey(stream.base_seed, {kInitTag, static_cast<std::uint64_t>(model),
                                                         static_cast<std::uint64_t>(i)});
    w[i] = sd * UnitPerturbation(spec.family, key);
  }
  return w;
}

double DrawRewardPerturbation(const PerturbationSpec& spec, const PerturbationStream& stream,
                              long model, const RewardKey& key) {
  std::uint64_t hashed = 0;
  if (const auto* step = std::get_if<StepKey>(&key)) {
    if (stream.keying != Keying::kByStep) {
      throw std::invalid_argument("DrawRewardPerturbation: step key on an arm-count stream");
    }
    hashed = HashKey(stream.base_seed, {kStepTag, static_cast<std::uint64_t>(model),
                                        static_cast<std::uint64_t>(step->step)});
  } else {
    const auto& arm = std::get<ArmCountKey>(key);
    if (stream.keying != Keying::kByArmCount) {
      throw std::invalid_argument("DrawRewardPerturbation: arm-count key on a step stream");
    }
    hashed = HashKey(stream.base_seed,
                     {kArmTag, static_cast<std::uint64_t>(model), static_cast<std::uint64_t>(arm.arm),
                      static_cast<std::uint64_t>(arm.count)});
  }
  return spec.scale * UnitPerturbation(spec.family, hashed);
}

}  // namespace linbandit
