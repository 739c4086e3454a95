#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "lcfi/fault/empirical.hpp"
#include "lcfi/fault/fault_spec.hpp"
#include "lcfi/fault/sampler.hpp"
#include "support.hpp"

using namespace lcfi;
using namespace lcfi::fault;

namespace {

FaultSpec spec_of(const std::string& text) { return parse_fault_spec(text); }

// Kolmogorov-Smirnov distance of samples against U(-b, b).
double ks_uniform(std::vector<double> xs, double b) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std::clamp((xs[i] + b) / (2 * b), 0.0, 1.0);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

}  // namespace

TEST_SUITE("fault") {
  TEST_CASE("grammar") {
    auto s = spec_of("uniform_abs(0.1)");
    CHECK(s.mode == BoundMode::Absolute);
    CHECK(s.distribution == Distribution::Uniform);
    CHECK(s.bound == 0.1);
    s = spec_of("normal_rel(10%)");
    CHECK(s.mode == BoundMode::Relative);
    CHECK(s.distribution == Distribution::Normal);
    CHECK(s.bound == doctest::Approx(0.1));
    s = spec_of("normal_abs(0.3, 0.25)");
    CHECK(s.sigma_ratio == 0.25);
    s = spec_of("empirical_rel(hist.txt, 0.5)");
    CHECK(s.distribution == Distribution::Empirical);
    CHECK(s.empirical_path == "hist.txt");
    s = spec_of("custom(triangular, 2)");
    CHECK(s.distribution == Distribution::Custom);
    CHECK(s.custom_name == "triangular");
    CHECK(s.mode == BoundMode::Absolute);
    CHECK(spec_of("custom(triangular, 0.5, rel)").mode == BoundMode::Relative);
  }

  TEST_CASE("grammar errors") {
    for (const char* bad : {"", "uniform(0.1)", "uniform_abs()", "uniform_abs(0)", "uniform_abs(-1)",
                            "uniform_abs(abc)", "normal_abs(0.1", "empirical_abs(0.1)", "uniform_abs(inf)",
                            "custom(x)", "uniform_abs(0.1) trailing"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(parse_fault_spec(bad), FaultError);
    }
  }

  TEST_CASE("format inverts parse") {
    for (const char* t : {"uniform_abs(0.1)", "uniform_rel(0.5)", "normal_abs(0.3)", "normal_rel(0.05,0.25)",
                          "empirical_abs(h.txt,1)", "custom(triangular,2)"}) {
      const auto s = spec_of(t);
      CHECK(parse_fault_spec(format_fault_spec(s)) == s);
    }
  }

  TEST_CASE("splitmix64 matches the reference sequence") {
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(mix64(1, 2, 3) == splitmix64(splitmix64(splitmix64(1) ^ 2) ^ 3));
    CHECK(mix64(7, 0, 0) != mix64(7, 1, 0));
  }

  TEST_CASE("same spec and seed give the same draws") {
    Sampler a(spec_of("uniform_abs(0.1)"), 42);
    Sampler b(spec_of("uniform_abs(0.1)"), 42);
    Sampler c(spec_of("uniform_abs(0.1)"), 43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
      const double x = a.sample_error(1.0);
      CHECK(x == b.sample_error(1.0));
      differs |= x != c.sample_error(1.0);
    }
    CHECK(differs);
  }

  TEST_CASE("uniform absolute bound and mean over a million draws") {
    Sampler s(spec_of("uniform_abs(0.1)"), 7);
    double sum = 0, maxabs = 0;
    int violations = 0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
      const double e = s.sample_error(3.0);
      violations += std::abs(e) > 0.1;
      maxabs = std::max(maxabs, std::abs(e));
      sum += e;
    }
    CHECK(violations == 0);
    CHECK(maxabs <= 0.1);
    // 3 sigma / sqrt(n) with sigma = b / sqrt(3)
    CHECK(std::abs(sum / n) <= 0.0005);
  }

  TEST_CASE("truncated normal standard deviation") {
    Sampler s(spec_of("normal_abs(0.3)"), 11);
    const int n = 1'000'000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double e = s.sample_error(0.0);
      REQUIRE(std::abs(e) <= 0.3);
      sum += e;
      sq += e * e;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(sd - 0.0973) <= 0.1 * 0.0973);
    // Closed form for a normal truncated at +-3 sigma:
    //   var = sigma^2 (1 - 6 phi(3) / (2 Phi(3) - 1))
    const double phi3 = std::exp(-4.5) / std::sqrt(2 * M_PI);
    const double mass = std::erf(3 / std::sqrt(2.0));
    const double exact = 0.1 * std::sqrt(1 - 6 * phi3 / mass);
    CHECK(std::abs(sd - exact) <= 0.01 * exact);
    CHECK(std::abs(mean) <= 4 * sd / std::sqrt(static_cast<double>(n)));
  }

  TEST_CASE("untruncated normal can exceed the bound") {
    auto spec = spec_of("normal_abs(0.1, 1.0)");
    spec.truncate = false;
    Sampler s(spec, 3);
    bool beyond = false;
    for (int i = 0; i < 10000 && !beyond; ++i) beyond = std::abs(s.sample_error(1.0)) > 0.1;
    CHECK(beyond);
  }

  TEST_CASE("uniform KS distance") {
    Sampler s(spec_of("uniform_abs(0.5)"), 5);
    std::vector<double> xs(100'000);
    for (auto& x : xs) x = s.sample_error(1.0);
    CHECK(ks_uniform(xs, 0.5) < 0.01);
  }

  TEST_CASE("relative bound scales with the value") {
    Sampler s(spec_of("uniform_rel(0.05)"), 9);
    for (int i = 0; i < 100000; ++i) CHECK_LE(std::abs(s.sample_error(4.0)), 0.2);
    CHECK(s.limit_for(-4.0) == doctest::Approx(0.2));
    CHECK(s.sample_error(0.0) == 0.0);
  }

  TEST_CASE("non-finite values are rejected") {
    Sampler s(spec_of("uniform_abs(1)"), 1);
    try {
      s.sample_error(std::nan(""));
      FAIL("expected FaultError");
    } catch (const FaultError& e) {
      CHECK(e.kind() == FaultError::Kind::NonFiniteValue);
    }
    CHECK_THROWS_AS(s.sample_error(INFINITY), FaultError);
  }

  TEST_CASE("seed_salt streams are independent") {
    auto a_spec = spec_of("uniform_abs(1)");
    auto b_spec = a_spec;
    b_spec.seed_salt = 1;
    Sampler a(a_spec, 100), b(b_spec, 100);
    const int n = 100'000, k = 10;
    std::vector<int> cells(k * k, 0);
    for (int i = 0; i < n; ++i) {
      const int x = std::min(k - 1, static_cast<int>((a.draw_normalized() + 1) / 2 * k));
      const int y = std::min(k - 1, static_cast<int>((b.draw_normalized() + 1) / 2 * k));
      ++cells[x * k + y];
    }
    double chi2 = 0;
    const double expect = static_cast<double>(n) / (k * k);
    for (int c : cells) chi2 += (c - expect) * (c - expect) / expect;
    // chi-square quantile 0.999 at 81 degrees of freedom
    CHECK(chi2 < 126.08);
  }

  TEST_CASE("apply_fault on the traced value") {
    const double faulted = 5.227364794930938;
    const auto bits = apply_fault_bits(NumericKind::F64, std::bit_cast<std::uint64_t>(4.0), faulted - 4.0, 2.0);
    CHECK(bits == 0x4014e8d25119f5e3ULL);
    CHECK(apply_fault(4.0, 1.2273) == doctest::Approx(5.2273));
    CHECK(apply_fault_bits(NumericKind::F64, std::bit_cast<std::uint64_t>(3.0), 0.0, 1.0) ==
          std::bit_cast<std::uint64_t>(3.0));
  }

  TEST_CASE("integer targets round the error") {
    CHECK(apply_fault_bits(NumericKind::I32, 7, 0.4, 1.0) == 7);
    CHECK(apply_fault_bits(NumericKind::I32, 7, 0.5, 1.0) == 7);
    CHECK(apply_fault_bits(NumericKind::I32, 7, 1.5, 2.0) == 9);
    CHECK(apply_fault_bits(NumericKind::I32, 7, -2.6, 3.0) == 4);
    // rounding 0.7 up to 1 would exceed the 0.8 limit
    CHECK(apply_fault_bits(NumericKind::I32, 7, 0.7, 0.8) == 7);
    CHECK(static_cast<std::int32_t>(apply_fault_bits(NumericKind::I32, 0xfffffffeULL, -1.0, 1.0)) == -3);
    CHECK(static_cast<std::int64_t>(apply_fault_bits(NumericKind::I64, 100, 12.2, 20.0)) == 112);
  }

  TEST_CASE("float results never exceed the limit after rounding") {
    Sampler s(spec_of("uniform_rel(0.3)"), 21);
    for (int i = 0; i < 200000; ++i) {
      const float v = static_cast<float>(0.001 * (i % 997) - 0.4);
      const auto bits = std::bit_cast<std::uint32_t>(v);
      const double e = s.sample_error(v);
      const double lim = s.limit_for(v);
      const float r = std::bit_cast<float>(static_cast<std::uint32_t>(apply_fault_bits(NumericKind::F32, bits, e, lim)));
      REQUIRE(std::abs(static_cast<double>(r) - v) <= lim);
    }
  }

  TEST_CASE("empirical distribution with two equal bins") {
    const auto path = test::fixture("fault/two_bins.txt");
    Sampler s(spec_of("empirical_abs(" + path + ",1)"), 13);
    std::vector<double> xs(1'000'000);
    for (auto& x : xs) x = s.sample_error(0.0);
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    CHECK(std::abs(xs[xs.size() / 2]) <= 0.01);
  }

  TEST_CASE("empirical single bin stays inside it") {
    const auto d = parse_empirical("0 1 1\n");
    for (double u = 0; u < 1; u += 0.001) {
      const double q = d.quantile(u);
      CHECK(q >= 0);
      CHECK(q <= 1);
    }
  }

  TEST_CASE("empirical file errors") {
    const char* bad[] = {"0 -1 1\n", "-1 0 -0.5\n0 1 1.5\n", "-1 0 abc\n", "-3 -2 1\n", "", "# only comments\n",
                         "-1 0 0.5\n-0.5 1 0.5\n"};
    for (const char* text : bad) {
      CAPTURE(text);
      CHECK_THROWS_AS(parse_empirical(text), FaultError);
    }
    try {
      parse_empirical("-1 0 0.5\n0 1 x\n");
      FAIL("expected FaultError");
    } catch (const FaultError& e) {
      CHECK(e.kind() == FaultError::Kind::EmpiricalFileError);
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(Sampler(spec_of("empirical_abs(/nonexistent/hist.txt, 1)"), 1), FaultError);
  }

  TEST_CASE("empirical masses are normalized") {
    const auto d = parse_empirical("-1 0 2\n0 1 6\n");
    CHECK(d.masses[0] == doctest::Approx(0.25));
    CHECK(d.cdf.back() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("custom samplers") {
    try {
      Sampler s(spec_of("custom(nope, 1)"), 1);
      FAIL("expected FaultError");
    } catch (const FaultError& e) {
      CHECK(e.kind() == FaultError::Kind::UnknownCustomName);
    }
    register_custom_sampler("always_half", [](std::mt19937_64&) { return 0.5; });
    Sampler s(spec_of("custom(always_half, 0.2)"), 1);
    CHECK(s.sample_error(10.0) == doctest::Approx(0.1));
    register_custom_sampler("too_big", [](std::mt19937_64&) { return 7.0; });
    Sampler t(spec_of("custom(too_big, 0.2)"), 1);
    CHECK(t.sample_error(10.0) == doctest::Approx(0.2));
  }
}
