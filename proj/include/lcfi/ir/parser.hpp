#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lcfi/error.hpp"
#include "lcfi/ir/diagnostic.hpp"
#include "lcfi/ir/module.hpp"

namespace lcfi::ir {

class ParseError : public Error {
 public:
  ParseError(int line, int column, std::string message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

struct ParseOutput {
  IrModule module;
  std::vector<Diagnostic> warnings;  // stripped attributes, metadata, linkage
  // Hook marker words found after "; !lcfi_index N", keyed by index.
  std::map<InstructionIndex, std::vector<std::string>> markers;
};

// Parses the supported textual IR subset. Throws ParseError.
IrModule parse_module(std::string_view text, std::string_view source_name = "<input>");
ParseOutput parse_module_ex(std::string_view text, std::string_view source_name = "<input>");

// Reads a file and parses it; the file path becomes the default source name.
ParseOutput parse_file(const std::string& path);

}  // namespace lcfi::ir
