#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "lcfi/ir/module.hpp"

namespace lcfi::ir {

// A loop found from a back edge latch -> header, where the header does not come
// after the latch in block order. Blocks are positions within the function.
struct Loop {
  std::size_t header = 0;
  std::set<std::size_t> blocks;  // includes header and latches
};

// Loops keyed by header; back edges sharing a header are merged.
std::vector<Loop> find_loops(const IrFunction& f);

// Smallest loop containing `block`, if any.
std::optional<Loop> innermost_loop(const IrFunction& f, std::size_t block);

}  // namespace lcfi::ir
