#include "lcfi/trace/propagation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace lcfi::trace {

bool PropagationGraph::has_node(ir::InstructionIndex idx) const {
  return std::any_of(nodes.begin(), nodes.end(), [idx](const PropagationNode& n) { return n.index == idx; });
}

namespace {

bool pure_value_op(ir::Opcode op) {
  switch (op) {
    case ir::Opcode::Store:
    case ir::Opcode::Call:
    case ir::Opcode::Ret:
    case ir::Opcode::Br:
      return false;
    default:
      return true;
  }
}

}  // namespace

PropagationGraph build_propagation(const DiffReport& diff, const ir::IrModule& indexed, const ir::UseGraph& uses,
                                   bool outputs_equal) {
  std::map<ir::InstructionIndex, const ir::Instruction*> insts;
  for (const auto& f : indexed.functions)
    for (const auto& b : f.blocks)
      for (const auto& i : b.instructions)
        if (i.index) insts[*i.index] = &i;

  for (const auto& d : diff.value_divergences)
    if (!insts.count(d.index)) throw IndexMismatch(d.index);
  for (const auto& d : diff.control_flow_divergences)
    if (!insts.count(d.index)) throw IndexMismatch(d.index);

  PropagationGraph g;
  std::map<ir::InstructionIndex, PropagationNode> nodes;
  // Per index: number of matched instances, and whether all of them agree.
  std::map<ir::InstructionIndex, std::pair<std::size_t, bool>> matched;
  for (const auto& p : diff.pairs) {
    if (!p.matched()) continue;
    const auto& gr = diff.golden[*p.golden];
    const auto& fr = diff.faulty[*p.faulty];
    auto& m = matched[gr.index];
    if (m.first == 0) m.second = true;
    ++m.first;
    if (!p.mismatch) continue;
    m.second = false;
    auto [it, fresh] = nodes.try_emplace(gr.index);
    if (fresh) it->second = {gr.index, gr.opcode, gr.bits, fr.bits, gr.width, 0};
    ++it->second.diverged_instances;
  }
  for (auto& [idx, n] : nodes) g.nodes.push_back(n);

  for (const auto& n : g.nodes) {
    const auto succ = uses.successors(n.index);
    for (auto s : succ)
      if (nodes.count(s)) g.edges.insert({n.index, s});
    bool any_executed = false;
    bool annihilated = !succ.empty();
    for (auto s : succ) {
      auto it = insts.find(s);
      if (it == insts.end() || !pure_value_op(it->second->opcode)) {
        annihilated = false;
        break;
      }
      auto m = matched.find(s);
      if (m == matched.end()) continue;
      any_executed = true;
      if (!m->second.second) {
        annihilated = false;
        break;
      }
    }
    if (annihilated && any_executed) g.annihilation_points.insert(n.index);
  }

  g.reconverged = !diff.pairs.empty() && diff.pairs.back().matched() && !diff.pairs.back().mismatch;
  const bool diverged = diff.classification != DiffClass::Identical;
  g.benign_candidate = diverged && g.reconverged && outputs_equal;
  return g;
}

namespace {

std::string hex(std::uint64_t bits, std::uint8_t width) {
  char buf[17];
  if (width == 8)
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
  else
    std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(bits));
  return buf;
}

}  // namespace

std::string trace_to_dot(const PropagationGraph& graph) {
  std::string out = "digraph lcfi {\n";
  for (const auto& n : graph.nodes) {
    out += "  n" + std::to_string(n.index) + " [label=\"" + std::to_string(n.index) + " / " + n.opcode + " / " +
           hex(n.golden_bits, n.width) + "→" + hex(n.faulty_bits, n.width) + "\"";
    if (graph.annihilation_points.count(n.index)) out += ", shape=doublecircle";
    out += "];\n";
  }
  for (const auto& [from, to] : graph.edges)
    out += "  n" + std::to_string(from) + " -> n" + std::to_string(to) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace lcfi::trace
