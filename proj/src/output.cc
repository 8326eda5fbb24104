#include "linbandit/output.h"

#include <cstdio>
#include <stdexcept>

#include "linbandit/config.h"

namespace linbandit {

using nlohmann::json;

std::string FormatReal(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", value);
  return buf;
}

std::string TraceHeader(bool with_monitors) {
  std::string header = "replication,t,arm,model,reward,instant_regret,cum_regret";
  if (with_monitors) header += ",conc_ok,anticonc_ok,optimism_ok";
  return header;
}

void WriteTraceRows(std::ostream& out, const RunRecord& record, bool with_monitors) {
  for (const StepRecord& s : record.steps) {
    out << record.replication << ',' << s.t << ',' << s.arm << ',' << s.model << ','
        << FormatReal(s.reward) << ',' << FormatReal(s.instant_regret) << ','
        << FormatReal(s.cum_regret);
    if (with_monitors) {
      out << ',' << int{s.conc_ok} << ',' << int{s.anticonc_ok} << ',' << int{s.optimism_ok};
    }
    out << '\n';
  }
}

namespace {

json VectorToJson(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

template <typename T>
json OptionalOrAuto(const std::optional<T>& value) {
  return value ? json(*value) : json("auto");
}

}  // namespace

json ConfigToJson(const ExperimentConfig& config) {
  json env = {
      {"dim", config.env.dim},
      {"arm_count", config.env.arm_count},
      {"arm_mode", config.env.arm_mode == ArmMode::kExplicit ? "explicit" : "random"},
      {"sigma", config.env.sigma},
      {"s_bound", config.env.s_bound},
      {"noise", ToString(config.env.noise)},
      {"seed", config.env.seed},
      {"resample", config.env.resample},
  };
  if (config.env.arm_mode == ArmMode::kExplicit) {
    json arms = json::array();
    for (const auto& x : config.env.arm_list) arms.push_back(VectorToJson(x));
    env["arm_list"] = arms;
    env["theta_star"] = VectorToJson(config.env.theta_star);
  }
  const json policy = {
      {"type", ToString(config.policy.kind)},
      {"lambda", config.policy.lambda},
      {"ensemble_size", OptionalOrAuto(config.policy.ensemble_size)},
      {"sampler", ToString(config.policy.sampler)},
      {"perturbation", ToString(config.policy.perturbation)},
      {"scale", OptionalOrAuto(config.policy.scale)},
      {"keying", ToString(config.policy.keying)},
      {"delta", config.policy.delta},
      {"eager_refresh", config.policy.eager_refresh},
      {"ucb_radius", OptionalOrAuto(config.policy.ucb_radius)},
      {"ts_scale", OptionalOrAuto(config.policy.ts_scale)},
  };
  const json run = {
      {"horizon", config.run.horizon},
      {"replications", config.run.replications},
      {"seed", config.run.seed},
      {"diagnostics", ToString(config.run.diagnostics)},
      {"trace", config.run.trace},
  };
  return {{"env", env}, {"policy", policy}, {"run", run}};
}

json SummaryToJson(const MonteCarloSummary& summary) {
  json checkpoints = json::array();
  for (const auto& c : summary.checkpoints) {
    checkpoints.push_back(
        {{"t", c.t}, {"mean", c.mean}, {"median", c.median}, {"q10", c.q10}, {"q90", c.q90}});
  }
  const MonitorRates& r = summary.monitor_rates;
  return {
      {"config", ConfigToJson(summary.config)},
      {"replications", summary.replications},
      {"resolved_ensemble_size",
       summary.resolved_ensemble_size >= 0 ? json(summary.resolved_ensemble_size) : json(nullptr)},
      {"resolved_scale", summary.resolved_scale},
      {"beta_T", summary.beta_T},
      {"gamma_T", summary.gamma_T},
      {"optimism_probability", summary.optimism_probability},
      {"theoretical_regret_bound", summary.theoretical_regret_bound},
      {"checkpoints", checkpoints},
      {"monitor_rates",
       {{"concentration_step", r.concentration_step},
        {"anticoncentration_step", r.anticoncentration_step},
        {"optimism_step", r.optimism_step},
        {"perturb_concentration_step", r.perturb_concentration_step},
        {"concentration_all_t", r.concentration_all_t},
        {"elliptical_pass", r.elliptical_pass},
        {"monitors_pass", r.monitors_pass}}},
  };
}

MonteCarloSummary SummaryFromJson(const json& j) {
  MonteCarloSummary s;
  s.replications = j.at("replications").get<long>();
  const json& m = j.at("resolved_ensemble_size");
  s.resolved_ensemble_size = m.is_null() ? -1 : m.get<long>();
  s.resolved_scale = j.at("resolved_scale").get<double>();
  s.beta_T = j.at("beta_T").get<double>();
  s.gamma_T = j.at("gamma_T").get<double>();
  s.optimism_probability = j.at("optimism_probability").get<double>();
  s.theoretical_regret_bound = j.at("theoretical_regret_bound").get<double>();
  for (const json& c : j.at("checkpoints")) {
    s.checkpoints.push_back({c.at("t").get<long>(), c.at("mean").get<double>(),
                             c.at("median").get<double>(), c.at("q10").get<double>(),
                             c.at("q90").get<double>()});
  }
  const json& r = j.at("monitor_rates");
  s.monitor_rates.concentration_step = r.at("concentration_step").get<double>();
  s.monitor_rates.anticoncentration_step = r.at("anticoncentration_step").get<double>();
  s.monitor_rates.optimism_step = r.at("optimism_step").get<double>();
  s.monitor_rates.perturb_concentration_step = r.at("perturb_concentration_step").get<double>();
  s.monitor_rates.concentration_all_t = r.at("concentration_all_t").get<double>();
  s.monitor_rates.elliptical_pass = r.at("elliptical_pass").get<double>();
  s.monitor_rates.monitors_pass = r.at("monitors_pass").get<double>();
  return s;
}

json RateReportToJson(const RateReport& r) {
  json out = {
      {"replications", r.replications},
      {"horizon", r.horizon},
      {"delta", r.delta},
      {"p_n", r.p_n},
      {"concentration_all_t", {{"rate", r.concentration_all_t_rate},
                               {"required", r.concentration_required},
                               {"pass", r.concentration_pass}}},
      {"perturb_concentration", {{"samples", r.perturb_samples},
                                 {"rate", r.perturb_concentration_rate},
                                 {"required", r.perturb_required},
                                 {"pass", r.perturb_pass}}},
      {"anticoncentration", {{"samples", r.anticonc_samples}, {"rate", r.anticonc_rate}}},
  };
  if (r.ensemble_fraction_applicable) {
    out["ensemble_fraction"] = {{"rate", r.ensemble_fraction_rate},
                                {"required", r.ensemble_fraction_required},
                                {"min_fraction", r.min_ensemble_fraction},
                                {"threshold", r.p_n / 4.0},
                                {"pass", r.ensemble_fraction_pass}};
  }
  return out;
}

TraceWriter::TraceWriter(const std::filesystem::path& path, bool with_monitors)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), with_monitors_(with_monitors) {
  if (!out_) throw std::runtime_error("cannot open trace file " + path.string());
  out_ << TraceHeader(with_monitors_) << '\n';
}

void TraceWriter::Append(const RunRecord& record) {
  WriteTraceRows(out_, record, with_monitors_);
  if (!out_) throw std::runtime_error("write failed for " + path_.string());
}

void TraceWriter::Close() {
  out_.close();
  if (out_.fail()) throw std::runtime_error("close failed for " + path_.string());
}

OutputPaths DefaultOutputPaths(const std::filesystem::path& out_dir) {
  return {out_dir / "trace.csv", out_dir / "summary.json"};
}

void WriteJsonFile(const std::filesystem::path& path, const json& document) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << document.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void EmitOutputs(const std::vector<RunRecord>& records, const MonteCarloSummary& summary,
                 const OutputPaths& paths) {
  const bool monitors = summary.config.run.diagnostics != DiagnosticsLevel::kOff;
  TraceWriter writer(paths.trace_csv, monitors);
  for (const auto& record : records) writer.Append(record);
  writer.Close();
  WriteJsonFile(paths.summary_json, SummaryToJson(summary));
}

}  // namespace linbandit
