#include "linbandit/config.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "linbandit/errors.h"

namespace linbandit {

namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void Fail(const std::string& section, const std::string& key, const std::string& why) {
  throw ConfigError("[" + section + "] " + key + ": " + why);
}

double ParseReal(const std::string& section, const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) Fail(section, key, "not a finite number: " + value);
    return v;
  } catch (const std::logic_error&) {
    Fail(section, key, "not a number: " + value);
  }
}

long ParseInt(const std::string& section, const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) Fail(section, key, "not an integer: " + value);
    return v;
  } catch (const std::logic_error&) {
    Fail(section, key, "not an integer: " + value);
  }
}

std::uint64_t ParseSeed(const std::string& section, const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used, 0);
    if (used != value.size() || value.front() == '-') Fail(section, key, "not a seed: " + value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::logic_error&) {
    Fail(section, key, "not a seed: " + value);
  }
}

bool ParseBool(const std::string& section, const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  Fail(section, key, "not a boolean: " + value);
}

Eigen::VectorXd ParseVector(const std::string& section, const std::string& key,
                            const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(ParseReal(section, key, Trim(item)));
  if (values.empty()) Fail(section, key, "empty vector");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<long>(values.size()));
}

// "x1,x2;y1,y2;..."
ArmSet ParseArmList(const std::string& section, const std::string& key, const std::string& text) {
  ArmSet arms;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = Trim(item);
    if (!item.empty()) arms.push_back(ParseVector(section, key, item));
  }
  if (arms.empty()) Fail(section, key, "empty arm list");
  return arms;
}

template <typename Enum, std::size_t N>
Enum ParseEnum(const std::string& section, const std::string& key, const std::string& value,
               const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [name, e] : table) {
    if (value == name) return e;
  }
  std::string allowed;
  for (const auto& [name, e] : table) allowed += std::string(allowed.empty() ? "" : "|") + name;
  Fail(section, key, "expected one of " + allowed + ", got " + value);
}

constexpr std::pair<const char*, PolicyKind> kPolicyNames[] = {
    {"ensemble", PolicyKind::kEnsemble}, {"phe", PolicyKind::kPhe},
    {"linucb", PolicyKind::kLinUcb},     {"lints", PolicyKind::kLinTs},
    {"greedy", PolicyKind::kGreedy}};
constexpr std::pair<const char*, DiagnosticsLevel> kDiagnosticsNames[] = {
    {"off", DiagnosticsLevel::kOff},
    {"monitors", DiagnosticsLevel::kMonitors},
    {"full-trace", DiagnosticsLevel::kFullTrace}};
constexpr std::pair<const char*, PerturbationFamily> kFamilyNames[] = {
    {"gaussian", PerturbationFamily::kGaussian},
    {"uniform", PerturbationFamily::kUniform},
    {"rademacher", PerturbationFamily::kRademacher},
    {"spherical", PerturbationFamily::kSphericalComponentwise},
    {"binomial", PerturbationFamily::kCenteredBinomial}};
constexpr std::pair<const char*, NoiseFamily> kNoiseNames[] = {
    {"gaussian", NoiseFamily::kGaussian},
    {"uniform", NoiseFamily::kUniform},
    {"rademacher", NoiseFamily::kRademacher}};
constexpr std::pair<const char*, ModelSampler> kSamplerNames[] = {
    {"uniform", ModelSampler::kUniform}, {"round_robin", ModelSampler::kRoundRobin}};
constexpr std::pair<const char*, Keying> kKeyingNames[] = {
    {"by_step", Keying::kByStep}, {"by_arm_count", Keying::kByArmCount}};
constexpr std::pair<const char*, ArmMode> kArmModeNames[] = {
    {"random", ArmMode::kRandom}, {"explicit", ArmMode::kExplicit}};

template <typename Enum, std::size_t N>
std::string NameOf(Enum e, const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [name, value] : table) {
    if (value == e) return name;
  }
  return "?";
}

void SetEnv(EnvConfig& env, const std::string& key, const std::string& value) {
  const std::string s = "env";
  if (key == "dim") env.dim = static_cast<int>(ParseInt(s, key, value));
  else if (key == "arm_count") env.arm_count = static_cast<int>(ParseInt(s, key, value));
  else if (key == "arm_mode") env.arm_mode = ParseEnum(s, key, value, kArmModeNames);
  else if (key == "arm_list") env.arm_list = ParseArmList(s, key, value);
  else if (key == "theta_star") env.theta_star = ParseVector(s, key, value);
  else if (key == "sigma") env.sigma = ParseReal(s, key, value);
  else if (key == "s_bound") env.s_bound = ParseReal(s, key, value);
  else if (key == "noise") env.noise = ParseEnum(s, key, value, kNoiseNames);
  else if (key == "seed") env.seed = ParseSeed(s, key, value);
  else if (key == "resample") env.resample = ParseBool(s, key, value);
  else Fail(s, key, "unknown key");
}

void SetPolicy(PolicyConfig& p, const std::string& key, const std::string& value) {
  const std::string s = "policy";
  if (key == "type") p.kind = ParseEnum(s, key, value, kPolicyNames);
  else if (key == "lambda") p.lambda = ParseReal(s, key, value);
  else if (key == "ensemble_size")
    p.ensemble_size = value == "auto" ? std::nullopt : std::optional<long>(ParseInt(s, key, value));
  else if (key == "sampler") p.sampler = ParseEnum(s, key, value, kSamplerNames);
  else if (key == "perturbation") p.perturbation = ParseEnum(s, key, value, kFamilyNames);
  else if (key == "scale")
    p.scale = value == "auto" ? std::nullopt : std::optional<double>(ParseReal(s, key, value));
  else if (key == "keying") p.keying = ParseEnum(s, key, value, kKeyingNames);
  else if (key == "delta") p.delta = ParseReal(s, key, value);
  else if (key == "eager_refresh") p.eager_refresh = ParseBool(s, key, value);
  else if (key == "ucb_radius")
    p.ucb_radius = value == "auto" ? std::nullopt : std::optional<double>(ParseReal(s, key, value));
  else if (key == "ts_scale")
    p.ts_scale = value == "auto" ? std::nullopt : std::optional<double>(ParseReal(s, key, value));
  else Fail(s, key, "unknown key");
}

void SetRun(RunConfig& r, const std::string& key, const std::string& value) {
  const std::string s = "run";
  if (key == "horizon") r.horizon = ParseInt(s, key, value);
  else if (key == "replications") r.replications = ParseInt(s, key, value);
  else if (key == "seed") r.seed = ParseSeed(s, key, value);
  else if (key == "diagnostics") r.diagnostics = ParseEnum(s, key, value, kDiagnosticsNames);
  else if (key == "out_dir") r.out_dir = value;
  else if (key == "threads") r.threads = static_cast<int>(ParseInt(s, key, value));
  else if (key == "trace") r.trace = ParseBool(s, key, value);
  else Fail(s, key, "unknown key");
}

}  // namespace

void SetConfigValue(ExperimentConfig& config, const std::string& section, const std::string& key,
                    const std::string& value) {
  const std::string v = Trim(value);
  if (section == "env") SetEnv(config.env, key, v);
  else if (section == "policy") SetPolicy(config.policy, key, v);
  else if (section == "run") SetRun(config.run, key, v);
  else throw ConfigError("unknown section [" + section + "]");
}

ExperimentConfig ParseConfig(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside of a section");
    if (section != "env" && section != "policy" && section != "run") {
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      SetConfigValue(config, section, key, node.get_value<std::string>());
    }
  }
  if (config.env.arm_mode == ArmMode::kExplicit) {
    if (config.env.arm_list.empty()) throw ConfigError("[env] arm_list required in explicit mode");
    if (config.env.theta_star.size() == 0) {
      throw ConfigError("[env] theta_star required in explicit mode");
    }
    config.env.dim = static_cast<int>(config.env.theta_star.size());
    config.env.arm_count = static_cast<int>(config.env.arm_list.size());
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return ParseConfig(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void ExperimentConfig::Validate() const {
  if (env.dim < 1) throw ConfigError("[env] dim must be >= 1");
  if (env.arm_count < 1) throw ConfigError("[env] arm_count must be >= 1");
  if (!(env.sigma >= 0.0)) throw ConfigError("[env] sigma must be >= 0");
  if (!(env.s_bound > 0.0)) throw ConfigError("[env] s_bound must be > 0");
  if (env.arm_mode == ArmMode::kExplicit) {
    for (const auto& x : env.arm_list) {
      if (x.size() != env.theta_star.size()) {
        throw ConfigError("[env] arm_list entries must match theta_star dimension");
      }
    }
  }
  if (!(policy.lambda > 0.0)) throw ConfigError("[policy] lambda must be > 0");
  if (!(policy.delta > 0.0 && policy.delta <= 1.0)) throw ConfigError("[policy] delta must be in (0, 1]");
  if (policy.ensemble_size && *policy.ensemble_size < 1) {
    throw ConfigError("[policy] ensemble_size must be >= 1");
  }
  if (policy.scale && !(*policy.scale >= 0.0)) throw ConfigError("[policy] scale must be >= 0");
  if (policy.ucb_radius && !(*policy.ucb_radius >= 0.0)) {
    throw ConfigError("[policy] ucb_radius must be >= 0");
  }
  if (policy.ts_scale && !(*policy.ts_scale >= 0.0)) throw ConfigError("[policy] ts_scale must be >= 0");
  if (run.horizon < 1) throw ConfigError("[run] horizon must be >= 1");
  if (run.replications < 1) throw ConfigError("[run] replications must be >= 1");
  if (run.threads < 1) throw ConfigError("[run] threads must be >= 1");
}

ConfidenceParams ExperimentConfig::confidence() const {
  ConfidenceParams p;
  p.sigma = env.sigma;
  p.lambda = policy.lambda;
  p.s_bound = env.s_bound;
  p.dim = env.dim;
  p.horizon = run.horizon;
  p.delta = policy.delta;
  return p;
}

long ExperimentConfig::ResolvedEnsembleSize() const {
  if (policy.ensemble_size) return *policy.ensemble_size;
  return EnsembleSize(confidence(), env.arm_count);
}

double ExperimentConfig::ResolvedScale() const {
  if (policy.scale) return *policy.scale;
  return Beta(confidence(), run.horizon);
}

std::string ToString(PolicyKind kind) { return NameOf(kind, kPolicyNames); }
std::string ToString(DiagnosticsLevel level) { return NameOf(level, kDiagnosticsNames); }
std::string ToString(PerturbationFamily family) { return NameOf(family, kFamilyNames); }
std::string ToString(NoiseFamily family) { return NameOf(family, kNoiseNames); }
std::string ToString(ModelSampler sampler) { return NameOf(sampler, kSamplerNames); }
std::string ToString(Keying keying) { return NameOf(keying, kKeyingNames); }

}  // namespace linbandit
