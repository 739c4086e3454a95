#include "lcfi/instrument/indexing.hpp"

namespace lcfi::instrument {

ir::IrModule assign_indices(ir::IrModule module) {
  ir::InstructionIndex next = 1;
  for (auto& f : module.functions)
    for (auto& b : f.blocks)
      for (auto& i : b.instructions) i.index = next++;
  return module;
}

}  // namespace lcfi::instrument
