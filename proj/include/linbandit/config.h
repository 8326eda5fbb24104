#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "linbandit/environment.h"
#include "linbandit/perturbation.h"
#include "linbandit/policies.h"

namespace linbandit {

enum class PolicyKind { kEnsemble, kPhe, kLinUcb, kLinTs, kGreedy };
enum class DiagnosticsLevel { kOff, kMonitors, kFullTrace };
enum class ArmMode { kRandom, kExplicit };

struct EnvConfig {
  int dim = 2;
  int arm_count = 4;
  ArmMode arm_mode = ArmMode::kRandom;
  ArmSet arm_list;               // explicit mode only
  Eigen::VectorXd theta_star;    // explicit mode only
  double sigma = 1.0;
  double s_bound = 1.0;
  NoiseFamily noise = NoiseFamily::kGaussian;
  std::uint64_t seed = 0;        // random mode: arms and theta*
  bool resample = false;         // random mode: fresh instance per replication
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kEnsemble;
  double lambda = 1.0;
  std::optional<long> ensemble_size;  // nullopt: AUTO from the sizing rule
  ModelSampler sampler = ModelSampler::kUniform;
  PerturbationFamily perturbation = PerturbationFamily::kGaussian;
  std::optional<double> scale;        // nullopt: AUTO = beta_T
  Keying keying = Keying::kByStep;
  double delta = 0.1;
  bool eager_refresh = false;
  std::optional<double> ucb_radius;   // nullopt: beta_{t-1}(delta)
  std::optional<double> ts_scale;     // nullopt: beta_T
};

struct RunConfig {
  long horizon = 100;
  long replications = 1;
  std::uint64_t seed = 0;
  DiagnosticsLevel diagnostics = DiagnosticsLevel::kMonitors;
  std::string out_dir = "out";
  int threads = 1;
  bool trace = true;
};

struct ExperimentConfig {
  EnvConfig env;
  PolicyConfig policy;
  RunConfig run;

  // Throws ConfigError on any out-of-domain field.
  void Validate() const;
  ConfidenceParams confidence() const;
  long ResolvedEnsembleSize() const;
  double ResolvedScale() const;
};

// Flat key-value text with [env], [policy] and [run] sections. Unknown
// sections or keys are errors. Missing keys keep their defaults.
ExperimentConfig ParseConfig(std::istream& in);
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// Applies one textual override, using the same key names as the file.
void SetConfigValue(ExperimentConfig& config, const std::string& section, const std::string& key,
                    const std::string& value);

std::string ToString(PolicyKind kind);
std::string ToString(DiagnosticsLevel level);
std::string ToString(PerturbationFamily family);
std::string ToString(NoiseFamily family);
std::string ToString(ModelSampler sampler);
std::string ToString(Keying keying);

}  // namespace linbandit
