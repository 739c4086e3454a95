#include "lcfi/campaign/classify.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

namespace lcfi::campaign {

std::string_view outcome_kind_name(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Crash: return "crash";
    case OutcomeKind::Sdc: return "sdc";
    case OutcomeKind::BenignMasked: return "benign_masked";
    case OutcomeKind::BenignNotActivated: return "benign_not_activated";
    case OutcomeKind::Hang: return "hang";
  }
  return "?";
}

std::optional<OutcomeKind> outcome_kind_from_name(std::string_view name) {
  for (auto k : kOutcomeKinds)
    if (outcome_kind_name(k) == name) return k;
  return std::nullopt;
}

std::string outcome_label(const OutcomeClass& c) {
  std::string s(outcome_kind_name(c.kind));
  if (c.trap) s += "(" + std::string(vm::trap_kind_name(*c.trap)) + ")";
  return s;
}

CompareOptions compare_options(const CampaignConfig& config) {
  return {config.compare_stdout, config.stdout_tolerance, config.compare_outputs};
}

namespace {

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const auto start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::optional<double> as_number(std::string_view tok) {
  std::string t(tok);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') return std::nullopt;
  return v;
}

}  // namespace

bool text_equal(std::string_view a, std::string_view b, double tolerance) {
  if (a == b) return true;
  if (tolerance <= 0) return false;
  const auto ta = tokens(a);
  const auto tb = tokens(b);
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] == tb[i]) continue;
    const auto x = as_number(ta[i]);
    const auto y = as_number(tb[i]);
    if (!x || !y || !(std::fabs(*x - *y) <= tolerance)) return false;
  }
  return true;
}

bool outputs_equal(const vm::RunOutcome& run, const vm::RunOutcome& golden, const CompareOptions& options) {
  if (options.compare_stdout && !text_equal(run.stdout_text, golden.stdout_text, options.stdout_tolerance))
    return false;
  if (options.files.empty()) return run.output_files == golden.output_files;
  for (const auto& f : options.files) {
    auto r = run.output_files.find(f.file);
    auto g = golden.output_files.find(f.file);
    const bool rh = r != run.output_files.end();
    const bool gh = g != golden.output_files.end();
    if (rh != gh) return false;
    if (rh && !text_equal(r->second, g->second, f.tolerance)) return false;
  }
  return true;
}

OutcomeClass classify_outcome(const vm::RunOutcome& run, const vm::RunOutcome& golden,
                              std::uint64_t activation_count, const CompareOptions& options) {
  if (golden.status != vm::RunStatus::Completed) {
    std::string why(vm::run_status_name(golden.status));
    if (golden.trap) why += ": " + std::string(vm::trap_kind_name(golden.trap->kind)) + " " + golden.trap->message;
    throw GoldenRunFailed("golden run did not complete (" + why + ")");
  }
  switch (run.status) {
    case vm::RunStatus::Trapped:
      return {OutcomeKind::Crash, run.trap ? std::optional(run.trap->kind) : std::nullopt};
    case vm::RunStatus::BudgetExhausted:
      return {OutcomeKind::Hang, std::nullopt};
    case vm::RunStatus::Completed:
      break;
  }
  if (!outputs_equal(run, golden, options)) return {OutcomeKind::Sdc, std::nullopt};
  return {activation_count > 0 ? OutcomeKind::BenignMasked : OutcomeKind::BenignNotActivated, std::nullopt};
}

}  // namespace lcfi::campaign
