#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lcfi/trace/trace.hpp"

namespace lcfi::trace {

enum class DiffClass { Identical, ValueDivergence, ControlDivergence, Both };

std::string_view diff_class_name(DiffClass c);

// One step of the alignment. Exactly one side is empty for unmatched records.
struct AlignedPair {
  std::optional<std::size_t> golden;
  std::optional<std::size_t> faulty;
  bool mismatch = false;  // matched pair with different bits, or unmatched record

  bool matched() const { return golden && faulty; }
  bool operator==(const AlignedPair&) const = default;
};

struct Divergence {
  std::optional<std::size_t> golden_position;
  std::optional<std::size_t> faulty_position;
  ir::InstructionIndex index = 0;
  std::optional<std::uint64_t> golden_bits;
  std::optional<std::uint64_t> faulty_bits;

  bool is_value() const { return golden_position && faulty_position; }
  bool operator==(const Divergence&) const = default;
};

struct DiffReport {
  Trace golden;
  Trace faulty;
  std::vector<AlignedPair> pairs;
  std::optional<Divergence> first_divergence;        // earliest mismatch or unmatched record
  std::optional<Divergence> first_value_divergence;
  std::vector<Divergence> value_divergences;
  std::vector<Divergence> control_flow_divergences;  // records present in one trace only
  DiffClass classification = DiffClass::Identical;
  bool approximate = false;  // the edit limit was hit and the windowed fallback was used
};

struct DiffOptions {
  // Upper bound on the edit distance searched exactly by the O((N+M)D) alignment.
  std::size_t max_edits = 4096;
  // Look-ahead of the fallback resynchronization.
  std::size_t fallback_window = 256;
};

// Aligns by a longest common subsequence of instruction indices; values are
// compared only within matched pairs.
DiffReport trace_diff(Trace golden, Trace faulty, const DiffOptions& options = {});

// Human-readable summary used by `lcfi trace diff`.
std::string format_diff(const DiffReport& report);

}  // namespace lcfi::trace
