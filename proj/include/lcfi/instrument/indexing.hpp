#pragma once

#include "lcfi/ir/module.hpp"

namespace lcfi::instrument {

// Numbers every instruction 1..N in function, block, instruction order.
// Existing indices are overwritten, so the result depends only on the text.
ir::IrModule assign_indices(ir::IrModule module);

}  // namespace lcfi::instrument
