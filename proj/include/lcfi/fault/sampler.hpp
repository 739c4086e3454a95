#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>

#include "lcfi/fault/empirical.hpp"
#include "lcfi/fault/fault_spec.hpp"

namespace lcfi::fault {

// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t z);

// Seed derivation for run `run` of a campaign:
//   mix64(a, b, c) = splitmix64(splitmix64(splitmix64(a) ^ b) ^ c)
std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Uniform double in [0, 1) from the top 53 bits of one engine output.
double unit_uniform(std::mt19937_64& rng);

// A custom distribution draws a normalized error; results are clamped to [-1, 1].
using CustomDraw = std::function<double(std::mt19937_64&)>;

// Registers (or replaces) a named custom distribution for `custom(name, b)`.
// "triangular" is registered by default.
void register_custom_sampler(const std::string& name, CustomDraw draw);
bool has_custom_sampler(const std::string& name);

// Deterministic stream of bounded errors for one injection run.
class Sampler {
 public:
  // Throws FaultError(UnknownCustomName | EmpiricalFileError | BadFaultSpec).
  Sampler(FaultSpec spec, std::uint64_t seed);

  // Raw error in normalized units ([-1, 1] unless truncation is disabled).
  double draw_normalized();

  // Error for `value`: normalized draw scaled by bound (absolute) or
  // bound * |value| (relative). Throws FaultError(NonFiniteValue).
  double sample_error(double value);

  // Largest admissible |error| for `value`.
  double limit_for(double value) const;

  const FaultSpec& spec() const { return spec_; }

 private:
  FaultSpec spec_;
  std::mt19937_64 rng_;
  std::shared_ptr<const EmpiricalDistribution> empirical_;
  CustomDraw custom_;
};

Sampler make_sampler(const FaultSpec& spec, std::uint64_t seed);

// value + error.
double apply_fault(double value, double error);

enum class NumericKind { I32, I64, F32, F64 };

double numeric_value(NumericKind kind, std::uint64_t bits);

// Applies `error` to a raw register pattern. Floats round to the target width
// and step back toward the original value if rounding overshoots `limit`;
// integers add the error rounded to nearest (ties to even), truncated toward
// zero instead when rounding would step past `limit`.
std::uint64_t apply_fault_bits(NumericKind kind, std::uint64_t bits, double error, double limit);

}  // namespace lcfi::fault
