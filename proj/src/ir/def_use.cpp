#include "lcfi/ir/def_use.hpp"

#include <map>
#include <string>

namespace lcfi::ir {

std::vector<InstructionIndex> UseGraph::successors(InstructionIndex producer) const {
  std::vector<InstructionIndex> out;
  for (auto it = edges.lower_bound({producer, 0}); it != edges.end() && it->first == producer; ++it) {
    out.push_back(it->second);
  }
  return out;
}

UseGraph build_def_use(const IrModule& module) {
  if (!module.fully_indexed()) throw IndicesMissing();
  UseGraph g;
  for (const auto& f : module.functions) {
    std::map<std::string, InstructionIndex> producers;
    for (const auto& b : f.blocks)
      for (const auto& i : b.instructions)
        if (i.result) producers[*i.result] = *i.index;
    for (const auto& b : f.blocks) {
      for (const auto& i : b.instructions) {
        for (const auto& op : i.operands) {
          if (op.kind != ValueKind::Register) continue;
          auto it = producers.find(op.name);
          if (it != producers.end()) g.edges.emplace(it->second, *i.index);
        }
      }
    }
  }
  return g;
}

}  // namespace lcfi::ir
