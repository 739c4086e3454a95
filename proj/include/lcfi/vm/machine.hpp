#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcfi/fault/sampler.hpp"
#include "lcfi/instrument/hooks.hpp"
#include "lcfi/instrument/target_spec.hpp"
#include "lcfi/trace/trace.hpp"

namespace lcfi::vm {

enum class TrapKind {
  OutOfBounds,
  DivisionByZero,
  InvalidBranch,
  StackOverflow,
  BadIntrinsicArg,
  NonFiniteFaultTarget,
};

std::string_view trap_kind_name(TrapKind kind);
std::optional<TrapKind> trap_kind_from_name(std::string_view name);

struct TrapInfo {
  TrapKind kind = TrapKind::OutOfBounds;
  ir::InstructionIndex index = 0;  // 0 when the module is unindexed
  std::uint64_t occurrence = 0;    // dynamic execution number of that instruction
  std::string message;
  bool operator==(const TrapInfo&) const = default;
};

enum class RunStatus { Completed, Trapped, BudgetExhausted };

std::string_view run_status_name(RunStatus status);

// Program-visible files. Host paths are read when the run starts; `contents`
// entries take precedence over `files` and `stdin_text` over `stdin_path`.
struct IoConfig {
  std::optional<std::string> stdin_path;
  std::optional<std::string> stdin_text;
  std::map<std::string, std::string> files;     // program name -> host path
  std::map<std::string, std::string> contents;  // program name -> bytes
};

struct ExecOptions {
  std::uint64_t budget = 100'000'000;
  std::uint32_t max_call_depth = 10'000;
  // Trap with non_finite_fault_target instead of skipping NaN/Inf activations.
  bool strict_non_finite = false;
  // Record trace lines for instructions carrying a trace hook.
  bool trace = true;
};

struct Activation {
  ir::InstructionIndex index = 0;
  std::uint64_t occurrence = 0;  // scope counter value that matched
  std::optional<std::size_t> trace_position;
  std::uint64_t original_bits = 0;
  std::uint64_t faulted_bits = 0;
  double error = 0.0;
  double limit = 0.0;
  bool operator==(const Activation&) const = default;
};

struct RunOutcome {
  RunStatus status = RunStatus::Completed;
  int exit_code = 0;
  std::optional<TrapInfo> trap;
  std::string stdout_text;
  std::string stderr_text;
  std::map<std::string, std::string> output_files;  // files the program wrote
  std::optional<trace::Trace> trace;
  std::uint64_t activation_count = 0;
  std::vector<Activation> activations;
  std::uint64_t instructions_executed = 0;
  std::vector<std::string> log;  // skipped activations and other notes

  bool operator==(const RunOutcome&) const = default;
};

// Runs @main. Traps and budget exhaustion are reported in the outcome; a
// malformed module or unreadable host file throws Error. Injection requires
// both `plan` and `sampler`.
RunOutcome execute(const instrument::InstrumentedModule& module, const IoConfig& io,
                   const instrument::InjectionPlan* plan = nullptr, fault::Sampler* sampler = nullptr,
                   const ExecOptions& options = {});

}  // namespace lcfi::vm
