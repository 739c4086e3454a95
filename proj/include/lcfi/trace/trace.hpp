#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lcfi/error.hpp"
#include "lcfi/ir/module.hpp"

namespace lcfi::trace {

// One line of a trace file.
struct TraceRecord {
  ir::InstructionIndex index = 0;
  std::string opcode;
  std::uint64_t bits = 0;
  std::uint8_t width = 4;  // bytes as formatted: 4 (8 hex digits) or 8 (16)
  std::size_t position = 0;

  bool operator==(const TraceRecord&) const = default;
};

using Trace = std::vector<TraceRecord>;

class TraceFormatError : public Error {
 public:
  TraceFormatError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// "ID: 15   OPCode: load   Value: 4010000000000000"
std::string format_record(const TraceRecord& r);

// Blank lines are skipped; any whitespace run separates fields.
Trace parse_trace(std::string_view text);
Trace read_trace(const std::string& path);

std::string format_trace(const Trace& records);
void write_trace(const std::string& path, const Trace& records);

}  // namespace lcfi::trace
