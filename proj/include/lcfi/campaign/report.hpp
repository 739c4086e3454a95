#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcfi/campaign/classify.hpp"
#include "lcfi/campaign/config.hpp"

namespace lcfi::campaign {

struct RunResult {
  std::uint64_t run_index = 0;
  std::uint64_t seed = 0;
  OutcomeClass outcome;
  std::uint64_t activation_count = 0;
  std::uint64_t instructions_executed = 0;
  std::map<std::string, std::optional<double>> metrics;  // completed runs only
  // Artifact paths relative to the campaign output directory.
  std::string std_output;
  std::string error_output;  // empty when nothing was written
  std::string prog_output;
  std::string injection_log;
  std::string trace;  // empty when tracing is off

  bool operator==(const RunResult&) const = default;
};

struct MetricSummary {
  std::string name;
  MetricTransform transform = MetricTransform::Identity;
  std::optional<double> golden;
  std::size_t count = 0;  // runs with a value
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> mean;

  bool operator==(const MetricSummary&) const = default;
};

struct Report {
  std::string program;  // file name
  std::string fault;    // fi_type text
  std::string scope;    // "invocation k=3"
  std::uint64_t campaign_seed = 0;
  std::uint64_t golden_instructions = 0;
  std::vector<std::uint64_t> targets;
  std::array<std::uint64_t, 5> counts{};  // indexed by OutcomeKind
  std::vector<RunResult> runs;
  std::vector<MetricSummary> metrics;

  std::uint64_t count(OutcomeKind k) const { return counts[static_cast<std::size_t>(k)]; }
  double percentage(OutcomeKind k) const;
  bool operator==(const Report&) const = default;
};

// Fills counts and metric summaries from `runs`, which must be in run order.
void summarize(Report& report, const std::vector<MetricExtractor>& extractors,
               const std::map<std::string, std::optional<double>>& golden_metrics);

// "crash 40% / sdc 60%"; classes with no runs are left out.
std::string percentage_line(const Report& report);

std::string render_text(const Report& report);
std::string render_json(const Report& report);
std::string render_csv(const Report& report);

// Inverse of render_json. Throws Error on malformed input.
Report report_from_json(const std::string& text);

// Writes report.txt, report.json and report.csv into `dir`.
void write_report(const Report& report, const std::string& dir);

}  // namespace lcfi::campaign
