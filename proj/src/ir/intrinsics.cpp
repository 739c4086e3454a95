#include "lcfi/ir/intrinsics.hpp"

#include <algorithm>
#include <array>

namespace lcfi::ir {

namespace {

constexpr std::array<std::string_view, 28> kNames = {
    "printf",  "scanf",   "__isoc99_scanf", "fprintf",   "fscanf", "__isoc99_fscanf",
    "freopen", "fopen",   "fclose",         "sqrt",      "fabs",   "pow",
    "exp",     "log",     "malloc",         "free",      "memset", "memcpy",
    "llvm.sqrt.f64", "llvm.fabs.f64", "llvm.pow.f64", "llvm.exp.f64", "llvm.log.f64",
    "llvm.memset.p0i8.i64", "llvm.memcpy.p0i8.p0i8.i64", "llvm.memset.p0.i64",
    "llvm.memcpy.p0.p0.i64", "calloc",
};

}  // namespace

std::span<const std::string_view> intrinsic_names() { return kNames; }

bool is_intrinsic(std::string_view name) {
  return std::find(kNames.begin(), kNames.end(), name) != kNames.end();
}

}  // namespace lcfi::ir
