#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "lcfi/error.hpp"

namespace lcfi::fault {

class FaultError : public Error {
 public:
  enum class Kind { BadFaultSpec, UnknownCustomName, EmpiricalFileError, NonFiniteValue };

  FaultError(Kind kind, std::string message, int line = 0)
      : Error(message), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  // Line within an empirical histogram file, 0 when not applicable.
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

enum class BoundMode { Absolute, Relative };
enum class Distribution { Uniform, Normal, Empirical, Custom };

// Error-bound mode x distribution. For relative mode `bound` is a fraction
// of |value| (1% is 0.01).
struct FaultSpec {
  BoundMode mode = BoundMode::Absolute;
  Distribution distribution = Distribution::Uniform;
  double bound = 0.0;
  double sigma_ratio = 1.0 / 3.0;  // normal: sigma = sigma_ratio * bound
  bool truncate = true;            // normal: reject draws outside +-bound
  std::string empirical_path;
  std::string custom_name;
  std::int64_t seed_salt = 0;

  bool operator==(const FaultSpec&) const = default;
};

// Parses the fi_type grammar:
//   uniform_abs(b) uniform_rel(b) normal_abs(b[,sigma_ratio]) normal_rel(b[,sigma_ratio])
//   empirical_abs(path,b) empirical_rel(path,b) custom(name,b[,abs|rel])
// Relative bounds may be written as percentages ("10%").
FaultSpec parse_fault_spec(std::string_view text);

// Inverse of parse_fault_spec (sigma_ratio printed only when not the default).
std::string format_fault_spec(const FaultSpec& spec);

// Throws FaultError(BadFaultSpec) when the bound is not positive and finite.
void check_fault_spec(const FaultSpec& spec);

}  // namespace lcfi::fault
