#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcfi/campaign/config.hpp"
#include "lcfi/error.hpp"
#include "lcfi/vm/machine.hpp"

namespace lcfi::campaign {

enum class OutcomeKind { Crash, Sdc, BenignMasked, BenignNotActivated, Hang };

inline constexpr OutcomeKind kOutcomeKinds[] = {OutcomeKind::Crash, OutcomeKind::Sdc, OutcomeKind::BenignMasked,
                                                OutcomeKind::BenignNotActivated, OutcomeKind::Hang};

std::string_view outcome_kind_name(OutcomeKind kind);
std::optional<OutcomeKind> outcome_kind_from_name(std::string_view name);

struct OutcomeClass {
  OutcomeKind kind = OutcomeKind::BenignNotActivated;
  std::optional<vm::TrapKind> trap;  // crash only

  bool operator==(const OutcomeClass&) const = default;
};

// "crash(out_of_bounds)", "sdc", ...
std::string outcome_label(const OutcomeClass& c);

class GoldenRunFailed : public Error {
 public:
  using Error::Error;
};

struct CompareOptions {
  bool compare_stdout = true;
  double stdout_tolerance = 0.0;
  // Empty: every file either run wrote is compared exactly.
  std::vector<OutputCompare> files;
};

CompareOptions compare_options(const CampaignConfig& config);

// Whitespace-separated tokens; tokens that both parse as numbers compare
// within `tolerance`, others compare exactly. tolerance 0 is byte equality.
bool text_equal(std::string_view a, std::string_view b, double tolerance);

bool outputs_equal(const vm::RunOutcome& run, const vm::RunOutcome& golden, const CompareOptions& options = {});

// Throws GoldenRunFailed unless the golden run completed.
OutcomeClass classify_outcome(const vm::RunOutcome& run, const vm::RunOutcome& golden,
                              std::uint64_t activation_count, const CompareOptions& options = {});

}  // namespace lcfi::campaign
