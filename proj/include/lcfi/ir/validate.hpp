#pragma once

#include <vector>

#include "lcfi/ir/diagnostic.hpp"
#include "lcfi/ir/module.hpp"

namespace lcfi::ir {

// Structural checks. Empty result iff the module is well formed:
//  - unique function names, one terminator per block, known branch targets
//  - unique registers per function, def-before-use within a block, cross-block
//    uses resolved anywhere in the function (phi operands exempt from ordering)
//  - callees defined in the module or registered intrinsics
//  - operand types agree with their definitions (pointers compare by kind only)
std::vector<Diagnostic> validate(const IrModule& module);

}  // namespace lcfi::ir
