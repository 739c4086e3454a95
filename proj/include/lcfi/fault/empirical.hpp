#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lcfi::fault {

// Histogram of normalized errors on [-1, 1]. Bins are contiguous; gaps in the
// source file become zero-mass bins.
struct EmpiricalDistribution {
  std::vector<double> edges;   // strictly increasing, size = masses.size() + 1
  std::vector<double> masses;  // non-negative, sum to 1
  std::vector<double> cdf;     // cdf[i] = mass of bins [0, i]

  // Inverse CDF with linear interpolation inside the selected bin. u in [0, 1).
  double quantile(double u) const;
};

// File format: one "edge_low edge_high mass" triple per line, '#' comments.
// Throws FaultError(EmpiricalFileError) with the offending line.
EmpiricalDistribution parse_empirical(std::string_view text);
EmpiricalDistribution load_empirical(const std::string& path);

}  // namespace lcfi::fault
