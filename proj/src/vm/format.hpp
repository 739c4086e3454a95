#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lcfi/ir/type.hpp"

namespace lcfi::vm::detail {

// Unsupported conversion or argument mismatch.
class FormatFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FormatArg {
  ir::TypeKind kind = ir::TypeKind::I32;
  std::uint64_t bits = 0;
};

// printf-family formatting over the conversions d i u x X o c s f F e E g G a A %.
// `read_string` fetches the NUL-terminated string behind a %s argument.
std::string format_printf(std::string_view fmt, std::span<const FormatArg> args,
                          const std::function<std::string(std::uint64_t)>& read_string);

struct ScanStore {
  enum class Kind { I8, I16, I32, I64, F32, F64, Bytes } kind = Kind::I32;
  std::uint64_t bits = 0;
  std::string bytes;  // %s (NUL appended) and %c
};

struct ScanResult {
  int assigned = 0;
  bool input_failure_first = false;  // input ended before the first conversion
  std::vector<ScanStore> stores;     // one per non-suppressed conversion, in order
};

// scanf-family matching of `input` from `pos`; advances `pos`.
ScanResult scan_input(std::string_view fmt, const std::string& input, std::size_t& pos);

}  // namespace lcfi::vm::detail
