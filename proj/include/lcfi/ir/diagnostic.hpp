#pragma once

#include <string>

namespace lcfi::ir {

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  std::string function;  // empty for module-level diagnostics
  std::string block;
  int instruction = -1;  // position within the block
  int line = 0;
  int column = 0;
};

// "file:line:col: message" with optional "(in @f, block %b)" suffix.
std::string format_diagnostic(const Diagnostic& d, const std::string& file);

}  // namespace lcfi::ir
