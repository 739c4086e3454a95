#include "lcfi/fault/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace lcfi::fault {

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, CustomDraw> draws;

  Registry() {
    draws["triangular"] = [](std::mt19937_64& rng) {
      return unit_uniform(rng) + unit_uniform(rng) - 1.0;
    };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void register_custom_sampler(const std::string& name, CustomDraw draw) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.draws[name] = std::move(draw);
}

bool has_custom_sampler(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  return r.draws.count(name) != 0;
}

Sampler::Sampler(FaultSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(mix64(seed, static_cast<std::uint64_t>(spec_.seed_salt), 0)) {
  check_fault_spec(spec_);
  if (spec_.distribution == Distribution::Empirical) {
    empirical_ = std::make_shared<const EmpiricalDistribution>(load_empirical(spec_.empirical_path));
  } else if (spec_.distribution == Distribution::Custom) {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    auto it = r.draws.find(spec_.custom_name);
    if (it == r.draws.end()) {
      throw FaultError(FaultError::Kind::UnknownCustomName,
                       "no custom distribution registered as '" + spec_.custom_name + "'");
    }
    custom_ = it->second;
  }
}

double Sampler::draw_normalized() {
  switch (spec_.distribution) {
    case Distribution::Uniform:
      return 2.0 * unit_uniform(rng_) - 1.0;
    case Distribution::Normal: {
      const double sigma = spec_.sigma_ratio;
      while (true) {
        // Box-Muller, first output only; u1 in (0, 1].
        const double u1 = 1.0 - unit_uniform(rng_);
        const double u2 = unit_uniform(rng_);
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        const double e = sigma * z;
        if (!spec_.truncate || std::abs(e) <= 1.0) return e;
      }
    }
    case Distribution::Empirical:
      return empirical_->quantile(unit_uniform(rng_));
    case Distribution::Custom:
      return std::clamp(custom_(rng_), -1.0, 1.0);
  }
  return 0.0;
}

double Sampler::limit_for(double value) const {
  return spec_.mode == BoundMode::Absolute ? spec_.bound : spec_.bound * std::abs(value);
}

double Sampler::sample_error(double value) {
  if (!std::isfinite(value)) {
    throw FaultError(FaultError::Kind::NonFiniteValue, "cannot perturb a non-finite value");
  }
  const double raw = draw_normalized();
  if (spec_.mode == BoundMode::Relative && value == 0.0) return 0.0;
  return raw * limit_for(value);
}

Sampler make_sampler(const FaultSpec& spec, std::uint64_t seed) { return Sampler(spec, seed); }

double apply_fault(double value, double error) { return value + error; }

double numeric_value(NumericKind kind, std::uint64_t bits) {
  switch (kind) {
    case NumericKind::I32: return static_cast<double>(static_cast<std::int32_t>(bits));
    case NumericKind::I64: return static_cast<double>(static_cast<std::int64_t>(bits));
    case NumericKind::F32: return std::bit_cast<float>(static_cast<std::uint32_t>(bits));
    case NumericKind::F64: return std::bit_cast<double>(bits);
  }
  return 0.0;
}

std::uint64_t apply_fault_bits(NumericKind kind, std::uint64_t bits, double error, double limit) {
  switch (kind) {
    case NumericKind::F64: {
      const double v = std::bit_cast<double>(bits);
      double r = apply_fault(v, error);
      while (std::abs(r - v) > limit) r = std::nextafter(r, v);
      return std::bit_cast<std::uint64_t>(r);
    }
    case NumericKind::F32: {
      const float v = std::bit_cast<float>(static_cast<std::uint32_t>(bits));
      float r = static_cast<float>(apply_fault(v, error));
      while (std::abs(static_cast<double>(r) - v) > limit) r = std::nextafter(r, v);
      return std::bit_cast<std::uint32_t>(r);
    }
    case NumericKind::I32:
    case NumericKind::I64: {
      double step = std::nearbyint(error);
      if (std::abs(step) > limit) step = std::trunc(error);
      if (kind == NumericKind::I32) {
        const auto v = static_cast<std::int64_t>(static_cast<std::int32_t>(bits));
        const auto r = static_cast<std::uint32_t>(v + static_cast<std::int64_t>(step));
        return r;
      }
      const auto v = static_cast<std::uint64_t>(bits);
      return v + static_cast<std::uint64_t>(static_cast<std::int64_t>(step));
    }
  }
  return bits;
}

}  // namespace lcfi::fault
