#pragma once

#include <set>
#include <utility>
#include <vector>

#include "lcfi/error.hpp"
#include "lcfi/ir/module.hpp"

namespace lcfi::ir {

class IndicesMissing : public Error {
 public:
  IndicesMissing() : Error("module has instructions without an index; run assign_indices first") {}
};

// Producer -> consumer edges between indexed instructions of the same function.
struct UseGraph {
  std::set<std::pair<InstructionIndex, InstructionIndex>> edges;

  std::vector<InstructionIndex> successors(InstructionIndex producer) const;
  bool contains(InstructionIndex producer, InstructionIndex consumer) const {
    return edges.count({producer, consumer}) != 0;
  }
  bool operator==(const UseGraph&) const = default;
};

// Throws IndicesMissing if any instruction lacks an index.
UseGraph build_def_use(const IrModule& module);

}  // namespace lcfi::ir
