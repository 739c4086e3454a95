#pragma once

#include <optional>
#include <string_view>

#include "lcfi/campaign/config.hpp"
#include "lcfi/error.hpp"
#include "lcfi/vm/machine.hpp"

namespace lcfi::campaign {

class NonPositiveForLog : public Error {
 public:
  explicit NonPositiveForLog(double value);
  double value() const { return value_; }

 private:
  double value_;
};

// identity, or -log10(v) (throws NonPositiveForLog for v <= 0).
double apply_transform(MetricTransform transform, double value);

// Applies the pattern to `text`; the capture of the chosen match is read with
// strtod. None when nothing matches or the capture is not a number.
std::optional<double> extract_metric_text(std::string_view text, const MetricExtractor& extractor);

// Same, reading the extractor's source from a completed run.
std::optional<double> extract_metric(const vm::RunOutcome& run, const MetricExtractor& extractor);

}  // namespace lcfi::campaign
