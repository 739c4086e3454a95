#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcfi/instrument/target_spec.hpp"
#include "lcfi/vm/machine.hpp"

namespace lcfi::campaign {

enum class MetricSource { Stdout, OutputFile };
enum class MetricTransform { Identity, NegLog10 };
enum class MatchPick { Last, First };

std::string_view transform_name(MetricTransform t);

struct MetricExtractor {
  std::string name;
  std::string pattern;  // exactly one capture group holding the number
  MetricSource source = MetricSource::Stdout;
  std::string file;     // OutputFile source
  MetricTransform transform = MetricTransform::Identity;
  MatchPick pick = MatchPick::Last;
};

// An output file taking part in output equality. A tolerance > 0 compares
// whitespace-separated numeric tokens within that absolute tolerance.
struct OutputCompare {
  std::string file;
  double tolerance = 0.0;
};

struct CampaignConfig {
  std::string program;      // .ll path
  std::string input_yaml;   // input.yaml path
  instrument::InputConfig input;
  std::uint64_t runs = 1;
  std::uint64_t campaign_seed = 0;
  std::uint64_t budget = 100'000'000;
  unsigned jobs = 1;
  bool trace = true;
  vm::IoConfig io;
  std::vector<MetricExtractor> metrics;
  bool compare_stdout = true;
  double stdout_tolerance = 0.0;
  std::vector<OutputCompare> compare_outputs;
  std::string output_dir;
  std::vector<std::string> warnings;
};

// Parses campaign.yaml. Relative paths resolve against `base_dir`. Throws
// ConfigError (key path) and ResolveError(MainFunctionRejected).
CampaignConfig parse_campaign_yaml(std::string_view text, const std::string& base_dir = ".");
CampaignConfig load_config(const std::string& path);

// Checks value ranges and extractor patterns; called by the loaders.
void check_config(const CampaignConfig& config);

}  // namespace lcfi::campaign
