#include "lcfi/ir/loops.hpp"

#include <map>

namespace lcfi::ir {

namespace {

std::vector<std::vector<std::size_t>> predecessors(const IrFunction& f) {
  std::vector<std::vector<std::size_t>> preds(f.blocks.size());
  for (std::size_t b = 0; b < f.blocks.size(); ++b) {
    const auto& insts = f.blocks[b].instructions;
    if (insts.empty() || insts.back().opcode != Opcode::Br) continue;
    for (const auto& l : insts.back().labels) {
      if (auto t = f.block_position(l)) preds[*t].push_back(b);
    }
  }
  return preds;
}

}  // namespace

std::vector<Loop> find_loops(const IrFunction& f) {
  const auto preds = predecessors(f);
  std::map<std::size_t, Loop> by_header;
  for (std::size_t latch = 0; latch < f.blocks.size(); ++latch) {
    const auto& insts = f.blocks[latch].instructions;
    if (insts.empty() || insts.back().opcode != Opcode::Br) continue;
    for (const auto& l : insts.back().labels) {
      auto header = f.block_position(l);
      if (!header || *header > latch) continue;
      Loop& loop = by_header[*header];
      loop.header = *header;
      loop.blocks.insert(*header);
      // Natural loop body: everything reaching the latch without passing the header.
      std::vector<std::size_t> work{latch};
      while (!work.empty()) {
        const std::size_t b = work.back();
        work.pop_back();
        if (!loop.blocks.insert(b).second) continue;
        for (std::size_t p : preds[b]) work.push_back(p);
      }
    }
  }
  std::vector<Loop> out;
  for (auto& [h, loop] : by_header) out.push_back(std::move(loop));
  return out;
}

std::optional<Loop> innermost_loop(const IrFunction& f, std::size_t block) {
  std::optional<Loop> best;
  for (auto& loop : find_loops(f)) {
    if (!loop.blocks.count(block)) continue;
    if (!best || loop.blocks.size() < best->blocks.size()) best = std::move(loop);
  }
  return best;
}

}  // namespace lcfi::ir
