#pragma once

#include <set>
#include <string>
#include <string_view>

#include "lcfi/instrument/target_spec.hpp"
#include "lcfi/ir/module.hpp"

namespace lcfi::instrument {

enum class HookMode { Plain, Profiling, Injection };

// An indexed module plus the hook markers the runtime dispatches on.
struct InstrumentedModule {
  ir::IrModule module;
  HookMode mode = HookMode::Plain;
  std::set<ir::InstructionIndex> trace_points;
  std::set<ir::InstructionIndex> inject_points;

  bool traced(ir::InstructionIndex idx) const { return trace_points.count(idx) != 0; }
  bool injected(ir::InstructionIndex idx) const { return inject_points.count(idx) != 0; }

  // Mode is a label only; two modules with the same markers behave the same.
  bool operator==(const InstrumentedModule& o) const {
    return module == o.module && trace_points == o.trace_points && inject_points == o.inject_points;
  }
};

// Profiling marks every value-producing instruction and every store for tracing.
// Injection additionally marks the plan's targets. Throws IndicesMissing for an
// unindexed module and Error when a target index is not in the module.
InstrumentedModule insert_hooks(const ir::IrModule& indexed, HookMode mode, const InjectionPlan* plan = nullptr);

// IR text with "; !lcfi_index N [!lcfi_trace] [!lcfi_inject]" annotations.
std::string print_instrumented(const InstrumentedModule& m);

// Reads text written by print_instrumented back, including markers.
InstrumentedModule parse_instrumented(std::string_view text, std::string_view source_name = "<input>");

struct ArtifactPaths {
  std::string index;      // <stem>-lcfi_index.ll
  std::string profiling;  // <stem>-lcfi_profiling.ll
  std::string fi;         // <stem>-lcfi_fi.ll
};

// Writes the three instrumented variants into `dir`.
ArtifactPaths write_artifacts(const ir::IrModule& indexed, const InjectionPlan& plan, const std::string& dir,
                              const std::string& stem);

}  // namespace lcfi::instrument
