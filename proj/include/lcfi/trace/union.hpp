#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lcfi/trace/trace.hpp"

namespace lcfi::trace {

struct UnionEntry {
  ir::InstructionIndex index = 0;
  std::string opcode;
  std::vector<std::uint64_t> counts;  // executions per input trace
  std::set<std::pair<std::uint8_t, std::uint64_t>> values;  // distinct (width, bits)

  bool operator==(const UnionEntry&) const = default;
};

struct TraceUnion {
  std::size_t trace_count = 0;
  std::vector<UnionEntry> entries;  // ascending by index

  const UnionEntry* find(ir::InstructionIndex idx) const;
};

// Per-index execution counts and distinct values across traces.
TraceUnion trace_union(const std::vector<Trace>& traces);

// One line per index: "ID: 18   OPCode: load   Count: 1 1   Values: 2   4010000000000000 4014e8d25119f5e3"
std::string format_union(const TraceUnion& u);

}  // namespace lcfi::trace
