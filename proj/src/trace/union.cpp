#include "lcfi/trace/union.hpp"

#include <algorithm>
#include <map>

namespace lcfi::trace {

const UnionEntry* TraceUnion::find(ir::InstructionIndex idx) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), idx,
                             [](const UnionEntry& e, ir::InstructionIndex i) { return e.index < i; });
  return it != entries.end() && it->index == idx ? &*it : nullptr;
}

TraceUnion trace_union(const std::vector<Trace>& traces) {
  std::map<ir::InstructionIndex, UnionEntry> by_index;
  for (std::size_t t = 0; t < traces.size(); ++t) {
    for (const auto& r : traces[t]) {
      auto& e = by_index[r.index];
      if (e.counts.empty()) {
        e.index = r.index;
        e.opcode = r.opcode;
        e.counts.assign(traces.size(), 0);
      }
      ++e.counts[t];
      e.values.insert({r.width, r.bits});
    }
  }
  TraceUnion u;
  u.trace_count = traces.size();
  for (auto& [idx, e] : by_index) u.entries.push_back(std::move(e));
  return u;
}

std::string format_union(const TraceUnion& u) {
  std::string out;
  for (const auto& e : u.entries) {
    TraceRecord head{e.index, e.opcode, 0, 4, 0};
    std::string line = format_record(head);
    line.resize(line.find("Value:"));
    line += "Count:";
    for (auto c : e.counts) line += " " + std::to_string(c);
    line += "   Values: " + std::to_string(e.values.size()) + "  ";
    for (const auto& [width, bits] : e.values) {
      TraceRecord v{e.index, e.opcode, bits, width, 0};
      const auto s = format_record(v);
      line += " " + s.substr(s.find("Value: ") + 7);
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace lcfi::trace
