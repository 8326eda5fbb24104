#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "linbandit/config.h"
#include "linbandit/harness.h"

namespace linbandit {

// Trace CSV:
//   replication,t,arm,model,reward,instant_regret,cum_regret[,conc_ok,anticonc_ok,optimism_ok]
// Reals use 17 significant digits in scientific notation; monitor columns
// appear only when diagnostics are on.
std::string TraceHeader(bool with_monitors);
void WriteTraceRows(std::ostream& out, const RunRecord& record, bool with_monitors);

// Real -> "%.16e" text.
std::string FormatReal(double value);

nlohmann::json ConfigToJson(const ExperimentConfig& config);
nlohmann::json SummaryToJson(const MonteCarloSummary& summary);
// Inverse of SummaryToJson for everything but the echoed config.
MonteCarloSummary SummaryFromJson(const nlohmann::json& json);
nlohmann::json RateReportToJson(const RateReport& report);

// Streams trace rows to a file as records arrive.
class TraceWriter {
 public:
  // Throws std::runtime_error with the path when the file cannot be opened.
  TraceWriter(const std::filesystem::path& path, bool with_monitors);
  void Append(const RunRecord& record);
  void Close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool with_monitors_;
};

struct OutputPaths {
  std::filesystem::path trace_csv;
  std::filesystem::path summary_json;
};

OutputPaths DefaultOutputPaths(const std::filesystem::path& out_dir);

// Writes the JSON document with two-space indentation and a trailing newline.
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& json);

// Writes every record's rows and the summary. Byte-stable for equal inputs.
void EmitOutputs(const std::vector<RunRecord>& records, const MonteCarloSummary& summary,
                 const OutputPaths& paths);

}  // namespace linbandit
