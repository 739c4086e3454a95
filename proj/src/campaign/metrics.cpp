#include "lcfi/campaign/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <regex>
#include <string>

namespace lcfi::campaign {

NonPositiveForLog::NonPositiveForLog(double value)
    : Error("neg_log10 needs a positive value, got " + std::to_string(value)), value_(value) {}

double apply_transform(MetricTransform transform, double value) {
  if (transform == MetricTransform::Identity) return value;
  if (!(value > 0)) throw NonPositiveForLog(value);
  return -std::log10(value);
}

std::optional<double> extract_metric_text(std::string_view text, const MetricExtractor& e) {
  const std::regex re(e.pattern);
  const std::string s(text);
  std::optional<std::string> capture;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    capture = (*it)[1].str();
    if (e.pick == MatchPick::First) break;
  }
  if (!capture) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(capture->c_str(), &end);
  if (end == capture->c_str()) return std::nullopt;
  return apply_transform(e.transform, v);
}

std::optional<double> extract_metric(const vm::RunOutcome& run, const MetricExtractor& e) {
  if (e.source == MetricSource::Stdout) return extract_metric_text(run.stdout_text, e);
  auto it = run.output_files.find(e.file);
  if (it == run.output_files.end()) return std::nullopt;
  return extract_metric_text(it->second, e);
}

}  // namespace lcfi::campaign
