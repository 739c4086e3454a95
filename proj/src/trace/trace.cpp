#include "lcfi/trace/trace.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lcfi::trace {

std::string format_record(const TraceRecord& r) {
  const std::string id = std::to_string(r.index);
  std::string out = "ID: " + id;
  out.append(std::max<std::size_t>(5, id.size() + 1) - id.size(), ' ');
  out += "OPCode: " + r.opcode;
  out.append(std::max<std::size_t>(7, r.opcode.size() + 1) - r.opcode.size(), ' ');
  char hex[17];
  if (r.width == 8)
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(r.bits));
  else
    std::snprintf(hex, sizeof hex, "%08llx", static_cast<unsigned long long>(r.bits & 0xffffffffULL));
  out += "Value: ";
  out += hex;
  return out;
}

namespace {

bool parse_hex(std::string_view s, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

Trace parse_trace(std::string_view text) {
  Trace out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (end == text.size()) break;
      continue;
    }
    std::istringstream in(line);
    std::string k1, id, k2, op, k3, val, extra;
    in >> k1 >> id >> k2 >> op >> k3 >> val;
    if (k1 != "ID:") throw TraceFormatError(line_no, "expected 'ID:'");
    std::uint32_t index = 0;
    {
      auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), index);
      if (id.empty() || ec != std::errc() || p != id.data() + id.size() || index == 0)
        throw TraceFormatError(line_no, "bad instruction id '" + id + "'");
    }
    if (k2 != "OPCode:" || op.empty()) throw TraceFormatError(line_no, "expected 'OPCode: <name>'");
    if (k3 != "Value:") throw TraceFormatError(line_no, "expected 'Value:'");
    TraceRecord r;
    r.index = index;
    r.opcode = op;
    if ((val.size() != 8 && val.size() != 16) || !parse_hex(val, r.bits))
      throw TraceFormatError(line_no, "value must be 8 or 16 hex digits");
    r.width = static_cast<std::uint8_t>(val.size() / 2);
    if (in >> extra) throw TraceFormatError(line_no, "trailing text '" + extra + "'");
    r.position = out.size();
    out.push_back(std::move(r));
    if (end == text.size()) break;
  }
  return out;
}

Trace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

std::string format_trace(const Trace& records) {
  std::string out;
  for (const auto& r : records) {
    out += format_record(r);
    out += '\n';
  }
  return out;
}

void write_trace(const std::string& path, const Trace& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trace " + path);
  out << format_trace(records);
}

}  // namespace lcfi::trace
