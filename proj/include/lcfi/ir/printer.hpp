#pragma once

#include <functional>
#include <string>

#include "lcfi/ir/module.hpp"

namespace lcfi::ir {

struct PrintOptions {
  // Extra words appended after "; !lcfi_index N" for an indexed instruction.
  std::function<std::string(InstructionIndex)> markers;
};

// Canonical typed-pointer text. Output re-parses to an equal module.
std::string print_module(const IrModule& module, const PrintOptions& options = {});

std::string print_instruction(const Instruction& inst);
std::string print_value(const Value& v);

}  // namespace lcfi::ir
