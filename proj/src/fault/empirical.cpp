#include "lcfi/fault/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lcfi/fault/fault_spec.hpp"

namespace lcfi::fault {

namespace {

[[noreturn]] void file_error(int line, const std::string& msg) {
  throw FaultError(FaultError::Kind::EmpiricalFileError,
                   "histogram line " + std::to_string(line) + ": " + msg, line);
}

}  // namespace

double EmpiricalDistribution::quantile(double u) const {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  std::size_t bin = it == cdf.end() ? masses.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
  while (masses[bin] == 0.0 && bin > 0) --bin;
  const double below = bin == 0 ? 0.0 : cdf[bin - 1];
  double frac = masses[bin] > 0.0 ? (u - below) / masses[bin] : 0.0;
  frac = std::clamp(frac, 0.0, 1.0);
  const double x = edges[bin] + frac * (edges[bin + 1] - edges[bin]);
  return std::clamp(x, -1.0, 1.0);
}

EmpiricalDistribution parse_empirical(std::string_view text) {
  struct Bin {
    double lo, hi, mass;
  };
  std::vector<Bin> bins;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> fields;
    for (std::string f; ls >> f;) fields.push_back(f);
    if (fields.empty()) continue;
    if (fields.size() != 3) file_error(line_no, "expected 'edge_low edge_high mass'");
    double v[3];
    for (int i = 0; i < 3; ++i) {
      try {
        std::size_t used = 0;
        v[i] = std::stod(fields[i], &used);
        if (used != fields[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        file_error(line_no, "'" + fields[i] + "' is not a number");
      }
      if (!std::isfinite(v[i])) file_error(line_no, "non-finite value");
    }
    if (!(v[0] < v[1])) file_error(line_no, "bin edges must be strictly increasing");
    if (!bins.empty() && v[0] < bins.back().hi) {
      file_error(line_no, "bin edges must be strictly increasing across bins");
    }
    if (v[2] < 0.0) file_error(line_no, "negative mass");
    bins.push_back({v[0], v[1], v[2]});
  }
  if (bins.empty()) file_error(line_no, "histogram has no bins");

  // Clip support to [-1, 1], keeping the in-range share of each bin's mass.
  EmpiricalDistribution d;
  double total = 0.0;
  for (const auto& b : bins) {
    const double lo = std::max(b.lo, -1.0);
    const double hi = std::min(b.hi, 1.0);
    if (!(lo < hi)) continue;
    const double mass = b.mass * (hi - lo) / (b.hi - b.lo);
    if (d.edges.empty()) {
      d.edges.push_back(lo);
    } else if (lo > d.edges.back()) {
      d.masses.push_back(0.0);
      d.edges.push_back(lo);
    }
    d.masses.push_back(mass);
    d.edges.push_back(hi);
    total += mass;
  }
  if (!(total > 0.0)) file_error(line_no, "no probability mass inside [-1, 1]");
  double acc = 0.0;
  for (auto& m : d.masses) {
    m /= total;
    acc += m;
    d.cdf.push_back(acc);
  }
  d.cdf.back() = 1.0;
  return d;
}

EmpiricalDistribution load_empirical(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FaultError(FaultError::Kind::EmpiricalFileError, "cannot open histogram file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_empirical(ss.str());
}

}  // namespace lcfi::fault
