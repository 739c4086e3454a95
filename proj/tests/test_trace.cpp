#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <random>
#include <set>

#include "lcfi/instrument/target_spec.hpp"
#include "lcfi/ir/def_use.hpp"
#include "lcfi/trace/diff.hpp"
#include "lcfi/trace/propagation.hpp"
#include "lcfi/trace/trace.hpp"
#include "lcfi/trace/union.hpp"
#include "support.hpp"

using namespace lcfi;
using namespace lcfi::trace;

namespace {

Trace profile_fixture() { return read_trace(test::fixture("traces/profile_trace.txt")); }
Trace injected_fixture() { return read_trace(test::fixture("traces/injected_trace.txt")); }

Trace make(std::initializer_list<std::pair<ir::InstructionIndex, std::uint64_t>> recs) {
  Trace t;
  for (const auto& [idx, bits] : recs) t.push_back({idx, "load", bits, 4, t.size()});
  return t;
}

Trace random_trace(std::mt19937_64& rng, std::size_t len, int alphabet) {
  Trace t;
  std::uniform_int_distribution<int> sym(1, alphabet);
  std::uniform_int_distribution<int> val(0, 3);
  for (std::size_t i = 0; i < len; ++i)
    t.push_back({static_cast<ir::InstructionIndex>(sym(rng)), "add", static_cast<std::uint64_t>(val(rng)), 4, i});
  return t;
}

// Longest common subsequence length by trying every subset of the shorter
// sequence, longest first.
std::size_t brute_lcs(const Trace& a, const Trace& b) {
  const Trace& s = a.size() <= b.size() ? a : b;
  const Trace& l = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
    const auto n = static_cast<std::size_t>(std::popcount(mask));
    if (n <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < s.size() && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < l.size() && l[j].index != s[i].index) ++j;
      if (j == l.size()) ok = false;
      else ++j;
    }
    if (ok) best = n;
  }
  return best;
}

// Recursive-descent check for the DOT subset:
//   graph   : 'digraph' ID '{' stmt* '}'
//   stmt    : ID [ '->' ID ] [ attrs ] ';'
//   attrs   : '[' ID '=' value { ',' ID '=' value } ']'
//   value   : ID | quoted string
class DotChecker {
 public:
  explicit DotChecker(const std::string& s) : s_(s) {}

  bool valid() {
    try {
      word("digraph");
      id();
      expect('{');
      while (peek() != '}') stmt();
      expect('}');
      skip();
      return pos_ == s_.size();
    } catch (int) {
      return false;
    }
  }

  std::size_t edges = 0;
  std::size_t nodes = 0;

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    if (pos_ >= s_.size()) throw 0;
    return s_[pos_];
  }
  void expect(char c) {
    if (peek() != c) throw 0;
    ++pos_;
  }
  void word(const std::string& w) {
    skip();
    if (s_.compare(pos_, w.size(), w) != 0) throw 0;
    pos_ += w.size();
  }
  std::string id() {
    skip();
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (pos_ == start || std::isdigit(static_cast<unsigned char>(s_[start]))) throw 0;
    return s_.substr(start, pos_ - start);
  }
  void value() {
    if (peek() == '"') {
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\') ++pos_;
        ++pos_;
      }
      if (pos_ >= s_.size()) throw 0;
      ++pos_;
    } else {
      id();
    }
  }
  void attrs() {
    expect('[');
    while (true) {
      id();
      expect('=');
      value();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    expect(']');
  }
  void stmt() {
    id();
    if (peek() == '-') {
      word("->");
      id();
      ++edges;
    } else {
      ++nodes;
    }
    if (peek() == '[') attrs();
    expect(';');
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

struct DemoRuns {
  ir::IrModule module;
  vm::RunOutcome golden;
  vm::RunOutcome faulty;
};

DemoRuns demo_runs() {
  DemoRuns r;
  r.module = test::load_indexed(test::fixture("demo/demo.ll"));
  r.golden = test::run_profile(r.module, test::fixture_io("demo"));
  const auto cfg = instrument::parse_input_yaml(
      "fi_type: uniform_rel(0.5)\nloop_num: 3\noption:\n  - {function_name: process, variable_name: n, in_arr: true, "
      "in_loop: true}\n");
  const auto plan = instrument::resolve_targets(r.module, cfg);
  fault::Sampler s(plan.fault, 4);
  r.faulty = vm::execute(instrument::insert_hooks(r.module, instrument::HookMode::Injection, &plan),
                         test::fixture_io("demo"), &plan, &s);
  return r;
}

}  // namespace

TEST_SUITE("trace") {
  TEST_CASE("reading the profile trace fixture") {
    const auto t = profile_fixture();
    REQUIRE(t.size() == 8);
    CHECK(t[0].index == 15u);
    CHECK(t[0].opcode == "load");
    CHECK(t[0].bits == 0x4010000000000000ULL);
    CHECK(t[0].width == 8);
    CHECK(t[1].width == 4);
    CHECK(t[7].position == 7u);
  }

  TEST_CASE("empty and malformed trace text") {
    CHECK(parse_trace("").empty());
    CHECK(parse_trace("\n\n").empty());
    try {
      parse_trace("ID: x");
      FAIL("expected TraceFormatError");
    } catch (const TraceFormatError& e) {
      CHECK(e.line() == 1);
    }
    for (const char* bad : {"ID: 1 OPCode: load", "ID: 1 OPCode: load Value: 123", "ID: 0 OPCode: load Value: 00000000",
                            "ID: 1 OP: load Value: 00000000", "ID: 1 OPCode: load Value: 0000000g"})
      CHECK_THROWS_AS(parse_trace(bad), TraceFormatError);
    try {
      parse_trace("ID: 1   OPCode: add   Value: 00000001\nID: 2 OPCode: add Value: 1\n");
      FAIL("expected TraceFormatError");
    } catch (const TraceFormatError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("write then read gives the same records") {
    const auto dir = test::scratch_dir("trace-rw");
    const auto path = (dir / "t.txt").string();
    auto t = profile_fixture();
    t.push_back({123456, "getelementptr", 0x11b0, 8, t.size()});
    write_trace(path, t);
    CHECK(read_trace(path) == t);
    CHECK(format_trace(profile_fixture()) == test::slurp(test::fixture("traces/profile_trace.txt")));
  }

  TEST_CASE("profile vs injected trace fixture") {
    const auto d = trace_diff(profile_fixture(), injected_fixture());
    REQUIRE(d.first_value_divergence);
    CHECK(d.first_value_divergence->index == 18u);
    CHECK(d.first_value_divergence->golden_bits == 0x4010000000000000ULL);
    CHECK(d.first_value_divergence->faulty_bits == 0x4014e8d25119f5e3ULL);
    REQUIRE(d.control_flow_divergences.size() == 1);
    CHECK(d.control_flow_divergences[0].index == 19u);
    CHECK(d.control_flow_divergences[0].golden_position == 4u);
    CHECK(!d.control_flow_divergences[0].faulty_position);
    CHECK(d.classification == DiffClass::Both);
    const auto text = format_diff(d);
    CHECK(text.find("first value divergence: ID 18") != std::string::npos);
    CHECK(text.find("golden 4010000000000000 faulty 4014e8d25119f5e3") != std::string::npos);
    CHECK(text.find("ID 19 (golden #4): present in golden only") != std::string::npos);
  }

  TEST_CASE("a trace against itself is identical") {
    const auto d = trace_diff(profile_fixture(), profile_fixture());
    CHECK(d.classification == DiffClass::Identical);
    CHECK(!d.first_divergence);
    CHECK(d.value_divergences.empty());
    CHECK(d.control_flow_divergences.empty());
    CHECK(d.pairs.size() == 8);
  }

  TEST_CASE("a missing record is a control divergence") {
    const auto d = trace_diff(make({{1, 0}, {2, 0}, {3, 0}}), make({{1, 0}, {3, 0}}));
    CHECK(d.classification == DiffClass::ControlDivergence);
    REQUIRE(d.first_divergence);
    CHECK(d.first_divergence->index == 2u);
    CHECK(!d.first_divergence->is_value());
  }

  TEST_CASE("alignment length matches a brute-force LCS") {
    std::mt19937_64 rng(2024);
    for (int iter = 0; iter < 400; ++iter) {
      const auto a = random_trace(rng, rng() % 13, 1 + static_cast<int>(rng() % 4));
      const auto b = random_trace(rng, rng() % 13, 1 + static_cast<int>(rng() % 4));
      const auto d = trace_diff(a, b);
      std::size_t matched = 0;
      std::size_t last_g = 0, last_f = 0;
      bool first = true;
      std::size_t seen_g = 0, seen_f = 0;
      for (const auto& p : d.pairs) {
        if (p.golden) ++seen_g;
        if (p.faulty) ++seen_f;
        if (!p.matched()) continue;
        ++matched;
        CHECK(a[*p.golden].index == b[*p.faulty].index);
        CHECK(p.mismatch == (a[*p.golden].bits != b[*p.faulty].bits));
        if (!first) {
          CHECK(*p.golden > last_g);
          CHECK(*p.faulty > last_f);
        }
        first = false;
        last_g = *p.golden;
        last_f = *p.faulty;
      }
      CHECK(seen_g == a.size());
      CHECK(seen_f == b.size());
      CHECK(matched == brute_lcs(a, b));
      CHECK(!d.approximate);
    }
  }

  TEST_CASE("swapping arguments keeps the alignment length") {
    std::mt19937_64 rng(77);
    for (int iter = 0; iter < 200; ++iter) {
      const auto a = random_trace(rng, 1 + rng() % 20, 3);
      const auto b = random_trace(rng, 1 + rng() % 20, 3);
      const auto matched = [](const DiffReport& d) {
        return std::count_if(d.pairs.begin(), d.pairs.end(), [](const AlignedPair& p) { return p.matched(); });
      };
      const auto ab = trace_diff(a, b);
      const auto ba = trace_diff(b, a);
      CHECK(matched(ab) == matched(ba));
      CHECK(ab.control_flow_divergences.size() == ba.control_flow_divergences.size());
      CHECK((ab.classification == DiffClass::Identical) == (ba.classification == DiffClass::Identical));
    }
  }

  TEST_CASE("long traces with a late divergence") {
    Trace a, b;
    for (std::size_t i = 0; i < 200000; ++i) {
      a.push_back({static_cast<ir::InstructionIndex>(1 + i % 7), "add", i, 4, i});
      b.push_back(a.back());
    }
    b[150000].bits ^= 1;
    b.erase(b.begin() + 180000);
    const auto d = trace_diff(a, b);
    REQUIRE(d.first_divergence);
    CHECK(d.first_divergence->golden_position == 150000u);
    CHECK(d.value_divergences.size() == 1);
    CHECK(d.control_flow_divergences.size() == 1);
  }

  TEST_CASE("edit limit falls back to a windowed alignment") {
    std::mt19937_64 rng(5);
    const auto a = random_trace(rng, 3000, 50);
    const auto b = random_trace(rng, 3000, 50);
    DiffOptions opts;
    opts.max_edits = 16;
    const auto d = trace_diff(a, b, opts);
    CHECK(d.approximate);
    std::size_t seen_g = 0, seen_f = 0;
    for (const auto& p : d.pairs) {
      if (p.golden) ++seen_g;
      if (p.faulty) ++seen_f;
      if (p.matched()) CHECK(a[*p.golden].index == b[*p.faulty].index);
    }
    CHECK(seen_g == a.size());
    CHECK(seen_f == b.size());
  }

  TEST_CASE("union of the two trace fixtures") {
    const auto u = trace_union({profile_fixture(), injected_fixture()});
    CHECK(u.trace_count == 2);
    REQUIRE(u.find(18));
    CHECK(u.find(18)->values.size() == 2);
    REQUIRE(u.find(15));
    CHECK(u.find(15)->values.size() == 1);
    REQUIRE(u.find(19));
    CHECK(u.find(19)->counts == std::vector<std::uint64_t>{1, 0});
    for (std::size_t i = 1; i < u.entries.size(); ++i) CHECK(u.entries[i - 1].index < u.entries[i].index);
    CHECK(format_union(u).find("ID: 18   OPCode: load   Count: 1 1   Values: 2   4010000000000000 4014e8d25119f5e3") !=
          std::string::npos);
  }

  TEST_CASE("union of one trace and of identical traces") {
    const auto t = test::run_profile(test::load_indexed(test::fixture("demo/demo.ll")), test::fixture_io("demo")).trace;
    REQUIRE(t);
    std::map<ir::InstructionIndex, std::uint64_t> counts;
    for (const auto& r : *t) ++counts[r.index];
    const auto one = trace_union({*t});
    CHECK(one.entries.size() == counts.size());
    for (const auto& e : one.entries) CHECK(e.counts[0] == counts[e.index]);
    const auto same = trace_union({profile_fixture(), profile_fixture(), profile_fixture()});
    for (const auto& e : same.entries) CHECK(e.values.size() == 1);
  }

  TEST_CASE("identical traces give an empty graph") {
    const auto m = test::load_indexed(test::fixture("demo/demo.ll"));
    const auto g = build_propagation(trace_diff(profile_fixture(), profile_fixture()), m, ir::build_def_use(m), true);
    CHECK(g.nodes.empty());
    CHECK(g.edges.empty());
    CHECK(!g.benign_candidate);
    CHECK(trace_to_dot(g) == "digraph lcfi {\n}\n");
  }

  TEST_CASE("demo propagation reaches ans without annihilation") {
    const auto r = demo_runs();
    const auto d = trace_diff(*r.golden.trace, *r.faulty.trace);
    const auto uses = ir::build_def_use(r.module);
    const auto g = build_propagation(d, r.module, uses, r.golden.stdout_text == r.faulty.stdout_text);
    CHECK(g.has_node(15));
    CHECK(g.has_node(18));
    CHECK(g.annihilation_points.empty());
    CHECK(!g.benign_candidate);
    for (const auto& e : g.edges) CHECK(uses.edges.count(e) == 1);
    for (const auto& v : d.value_divergences) CHECK(g.has_node(v.index));
    const auto dot = trace_to_dot(g);
    DotChecker checker(dot);
    CHECK(checker.valid());
    CHECK(checker.nodes == g.nodes.size());
    CHECK(checker.edges == g.edges.size());
  }

  TEST_CASE("two nodes and one edge in DOT") {
    PropagationGraph g;
    g.nodes.push_back({15, "load", 0x4010000000000000ULL, 0x4014e8d25119f5e3ULL, 8, 1});
    g.nodes.push_back({16, "fadd", 1, 2, 8, 1});
    g.edges.insert({15, 16});
    g.annihilation_points.insert(16);
    const auto dot = trace_to_dot(g);
    std::size_t arrows = 0;
    for (std::size_t at = dot.find("->"); at != std::string::npos; at = dot.find("->", at + 2)) ++arrows;
    CHECK(arrows == 1);
    CHECK(dot.find("n15 -> n16;") != std::string::npos);
    CHECK(dot.find("doublecircle") != std::string::npos);
    CHECK(DotChecker(dot).valid());
  }

  TEST_CASE("threshold fixture annihilates the fault") {
    const auto m = test::load_indexed(test::fixture("threshold/threshold.ll"));
    const auto golden = test::run_profile(m, {});
    const auto cfg = instrument::load_input_yaml(test::fixture("threshold/input.yaml"));
    const auto plan = instrument::resolve_targets(m, cfg);
    fault::Sampler s(plan.fault, 12);
    const auto faulty = vm::execute(instrument::insert_hooks(m, instrument::HookMode::Injection, &plan), {}, &plan, &s);
    REQUIRE(faulty.activation_count > 0);
    const bool equal = faulty.stdout_text == golden.stdout_text;
    CHECK(equal);
    const auto d = trace_diff(*golden.trace, *faulty.trace);
    const auto g = build_propagation(d, m, ir::build_def_use(m), equal);
    CHECK(!g.annihilation_points.empty());
    CHECK(g.benign_candidate);
    CHECK(g.reconverged);
    // Everything after the last diverged record is the same in both runs.
    REQUIRE(d.value_divergences.size() > 0);
    const auto gp = *d.value_divergences.back().golden_position;
    const auto fp = *d.value_divergences.back().faulty_position;
    REQUIRE(golden.trace->size() - gp == faulty.trace->size() - fp);
    for (std::size_t k = 1; gp + k < golden.trace->size(); ++k) {
      CHECK((*golden.trace)[gp + k].index == (*faulty.trace)[fp + k].index);
      CHECK((*golden.trace)[gp + k].bits == (*faulty.trace)[fp + k].bits);
    }
  }

  TEST_CASE("indices missing from the module are rejected") {
    const auto m = test::load_indexed(test::fixture("threshold/threshold.ll"));
    const auto d = trace_diff(make({{5000, 1}}), make({{5000, 2}}));
    CHECK_THROWS_AS(build_propagation(d, m, ir::build_def_use(m), false), IndexMismatch);
  }
}
