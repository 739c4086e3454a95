#pragma once

#include <span>
#include <string_view>

namespace lcfi::ir {

// Names of external functions the runtime implements. Calls to anything else
// that is not defined in the module fail validation.
std::span<const std::string_view> intrinsic_names();
bool is_intrinsic(std::string_view name);

}  // namespace lcfi::ir
