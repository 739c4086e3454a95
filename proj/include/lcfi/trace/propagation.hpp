#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lcfi/error.hpp"
#include "lcfi/ir/def_use.hpp"
#include "lcfi/ir/module.hpp"
#include "lcfi/trace/diff.hpp"

namespace lcfi::trace {

class IndexMismatch : public Error {
 public:
  explicit IndexMismatch(ir::InstructionIndex idx)
      : Error("trace index " + std::to_string(idx) + " does not exist in the module"), index_(idx) {}
  ir::InstructionIndex index() const { return index_; }

 private:
  ir::InstructionIndex index_;
};

// A static instruction with at least one diverged dynamic instance; the values
// are those of its first diverged instance.
struct PropagationNode {
  ir::InstructionIndex index = 0;
  std::string opcode;
  std::uint64_t golden_bits = 0;
  std::uint64_t faulty_bits = 0;
  std::uint8_t width = 4;
  std::size_t diverged_instances = 0;

  bool operator==(const PropagationNode&) const = default;
};

struct PropagationGraph {
  std::vector<PropagationNode> nodes;  // ascending by index
  std::set<std::pair<ir::InstructionIndex, ir::InstructionIndex>> edges;
  std::set<ir::InstructionIndex> annihilation_points;
  bool reconverged = false;  // final records of both traces match
  bool benign_candidate = false;

  bool has_node(ir::InstructionIndex idx) const;
};

// A diverged node is an annihilation point when each of its def-use successors
// is a pure value operation (not store, call, ret or br), at least one of them
// executed, and every matched instance of every successor has equal values in
// both traces. Throws IndexMismatch when the diff names an index the module lacks.
PropagationGraph build_propagation(const DiffReport& diff, const ir::IrModule& indexed, const ir::UseGraph& uses,
                                   bool outputs_equal);

// digraph lcfi { ... } with labels "idx / opcode / golden→faulty".
std::string trace_to_dot(const PropagationGraph& graph);

}  // namespace lcfi::trace
