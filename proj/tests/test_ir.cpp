#include <doctest.h>

#include <random>
#include <sstream>

#include "lcfi/ir/def_use.hpp"
#include "lcfi/ir/loops.hpp"
#include "lcfi/ir/parser.hpp"
#include "lcfi/ir/printer.hpp"
#include "lcfi/ir/validate.hpp"
#include "support.hpp"

using namespace lcfi;

namespace {

std::string demo_text() { return test::slurp(test::fixture("demo/demo.ll")); }

// Random well-formed module text. Every function is a chain of blocks; each
// block computes a few values from earlier ones, the last block returns.
class ModuleGen {
 public:
  explicit ModuleGen(std::uint64_t seed) : rng_(seed) {}

  std::string generate() {
    out_.str("");
    const bool with_struct = pick(2) == 0;
    if (with_struct) out_ << "%struct.pair = type { i32, double }\n";
    const int nglobals = pick(4);
    for (int g = 0; g < nglobals; ++g) global(g, with_struct);
    const int nfuncs = 1 + pick(3);
    for (int f = 0; f < nfuncs; ++f) function(f);
    if (pick(2)) out_ << "declare double @sqrt(double)\n";
    return out_.str();
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::string fconst() {
    static const char* k[] = {"0.000000e+00", "1.500000e+00", "-2.250000e+00", "3.000000e+00", "1.000000e-01",
                              "0x3FB999999999999A", "4.000000e+00"};
    return k[pick(7)];
  }

  void global(int g, bool with_struct) {
    switch (pick(with_struct ? 6 : 5)) {
      case 0: out_ << "@g" << g << " = global i32 " << pick(100) - 50 << ", align 4\n"; break;
      case 1: out_ << "@g" << g << " = global [3 x double] [double " << fconst() << ", double " << fconst()
                   << ", double " << fconst() << "], align 16\n"; break;
      case 2: out_ << "@g" << g << " = global [4 x i64] zeroinitializer, align 16\n"; break;
      case 3: out_ << "@g" << g << " = constant [4 x i8] c\"ab\\0A\\00\", align 1\n"; break;
      case 4: out_ << "@g" << g << " = global double " << fconst() << ", align 8\n"; break;
      default: out_ << "@g" << g << " = global %struct.pair { i32 7, double " << fconst() << " }, align 8\n";
    }
  }

  struct Reg {
    std::string name;
    std::string type;
  };

  std::string operand(const std::vector<Reg>& regs, const std::string& type) {
    std::vector<const Reg*> ok;
    for (const auto& r : regs)
      if (r.type == type) ok.push_back(&r);
    if (!ok.empty() && pick(4) != 0) return "%" + ok[pick(static_cast<int>(ok.size()))]->name;
    if (type == "double") return fconst();
    if (type == "i1") return pick(2) ? "true" : "false";
    return std::to_string(pick(20) - 10);
  }

  void function(int f) {
    const int nparams = pick(3);
    std::vector<Reg> regs;
    out_ << "define i32 @f" << f << "(";
    for (int p = 0; p < nparams; ++p) {
      const std::string t = pick(2) ? "i32" : "double";
      out_ << (p ? ", " : "") << t << " %p" << p;
      regs.push_back({"p" + std::to_string(p), t});
    }
    out_ << ") {\n";
    const int nblocks = 1 + pick(4);
    int counter = 0;
    const auto fresh = [&] { return "v" + std::to_string(counter++); };
    for (int b = 0; b < nblocks; ++b) {
      out_ << "b" << b << ":\n";
      if (b == 0) {
        const auto slot = fresh();
        out_ << "  %" << slot << " = alloca double, align 8\n";
        out_ << "  store double " << operand(regs, "double") << ", double* %" << slot << ", align 8\n";
        const auto l = fresh();
        out_ << "  %" << l << " = load double, double* %" << slot << ", align 8\n";
        regs.push_back({l, "double"});
        const auto arr = fresh();
        out_ << "  %" << arr << " = alloca [4 x i32], align 16\n";
        const auto gep = fresh();
        out_ << "  %" << gep << " = getelementptr inbounds [4 x i32], [4 x i32]* %" << arr << ", i64 0, i64 "
             << pick(4) << "\n";
        out_ << "  store i32 " << operand(regs, "i32") << ", i32* %" << gep << ", align 4\n";
      }
      const int ninst = 1 + pick(6);
      for (int k = 0; k < ninst; ++k) {
        const auto r = fresh();
        switch (pick(11)) {
          case 0: {
            static const char* ops[] = {"add", "sub", "mul", "add nsw", "mul nsw"};
            out_ << "  %" << r << " = " << ops[pick(5)] << " i32 " << operand(regs, "i32") << ", "
                 << operand(regs, "i32") << "\n";
            regs.push_back({r, "i32"});
            break;
          }
          case 1: {
            static const char* ops[] = {"fadd", "fsub", "fmul", "fdiv"};
            out_ << "  %" << r << " = " << ops[pick(4)] << " double " << operand(regs, "double") << ", "
                 << operand(regs, "double") << "\n";
            regs.push_back({r, "double"});
            break;
          }
          case 2: {
            static const char* preds[] = {"eq", "ne", "slt", "sle", "sgt", "sge", "ult", "ugt"};
            out_ << "  %" << r << " = icmp " << preds[pick(8)] << " i32 " << operand(regs, "i32") << ", "
                 << operand(regs, "i32") << "\n";
            regs.push_back({r, "i1"});
            break;
          }
          case 3: {
            static const char* preds[] = {"oeq", "one", "olt", "ole", "ogt", "oge", "une", "ult"};
            out_ << "  %" << r << " = fcmp " << preds[pick(8)] << " double " << operand(regs, "double") << ", "
                 << operand(regs, "double") << "\n";
            regs.push_back({r, "i1"});
            break;
          }
          case 4:
            out_ << "  %" << r << " = sitofp i32 " << operand(regs, "i32") << " to double\n";
            regs.push_back({r, "double"});
            break;
          case 5:
            out_ << "  %" << r << " = fptosi double " << operand(regs, "double") << " to i32\n";
            regs.push_back({r, "i32"});
            break;
          case 6: {
            const auto w = fresh();
            out_ << "  %" << w << " = sext i32 " << operand(regs, "i32") << " to i64\n";
            out_ << "  %" << r << " = trunc i64 %" << w << " to i32\n";
            regs.push_back({r, "i32"});
            break;
          }
          case 7:
            out_ << "  %" << r << " = select i1 " << operand(regs, "i1") << ", double " << operand(regs, "double")
                 << ", double " << operand(regs, "double") << "\n";
            regs.push_back({r, "double"});
            break;
          case 8:
            out_ << "  %" << r << " = fneg double " << operand(regs, "double") << "\n";
            regs.push_back({r, "double"});
            break;
          case 9: {
            std::vector<int> nullary;
            for (int c = 0; c < f; ++c)
              if (arity_[static_cast<std::size_t>(c)] == 0) nullary.push_back(c);
            if (!nullary.empty()) {
              out_ << "  %" << r << " = call i32 @f" << nullary[pick(static_cast<int>(nullary.size()))] << "()\n";
            } else {
              out_ << "  %" << r << " = zext i1 " << operand(regs, "i1") << " to i32\n";
            }
            regs.push_back({r, "i32"});
            break;
          }
          default: {
            const auto w = fresh();
            out_ << "  %" << w << " = fpext float 1.500000e+00 to double\n";
            out_ << "  %" << r << " = fptrunc double %" << w << " to float\n";
            regs.push_back({w, "double"});
            break;
          }
        }
      }
      if (b + 1 < nblocks) {
        if (pick(2)) {
          out_ << "  br i1 " << operand(regs, "i1") << ", label %b" << b + 1 << ", label %b" << nblocks - 1 << "\n";
        } else {
          out_ << "  br label %b" << b + 1 << "\n";
        }
      } else {
        out_ << "  ret i32 " << operand(regs, "i32") << "\n";
      }
    }
    out_ << "}\n\n";
    arity_.push_back(nparams);
  }

  std::mt19937_64 rng_;
  std::ostringstream out_;
  std::vector<int> arity_;
};

}  // namespace

TEST_SUITE("ir") {
  TEST_CASE("demo process function has five blocks") {
    const auto m = ir::parse_module(demo_text(), "demo.ll");
    const auto* f = m.find_function("process");
    REQUIRE(f != nullptr);
    REQUIRE(f->blocks.size() == 5);
    CHECK(f->blocks[1].label == "2");
    CHECK(f->blocks[2].label == "5");
    CHECK(f->blocks[3].label == "14");
    CHECK(f->blocks[4].label == "17");
    CHECK(f->params.size() == 1);
    CHECK(f->params[0].name == "n");
    CHECK(ir::validate(m).empty());
  }

  TEST_CASE("empty text gives an empty module") {
    const auto m = ir::parse_module("");
    CHECK(m.functions.empty());
    CHECK(m.globals.empty());
  }

  TEST_CASE("truncated define is a parse error on line 1") {
    try {
      ir::parse_module("define double @f(");
      FAIL("expected ParseError");
    } catch (const ir::ParseError& e) {
      CHECK(e.line() == 1);
    }
  }

  TEST_CASE("unknown opcode is a parse error with position") {
    const std::string text = "define i32 @main() {\n  %1 = frobnicate i32 1, 2\n  ret i32 0\n}\n";
    try {
      ir::parse_module(text);
      FAIL("expected ParseError");
    } catch (const ir::ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() > 0);
    }
  }

  TEST_CASE("malformed inputs never crash") {
    const char* cases[] = {"define", "define i32 @f() {", "@x = global", "define i32 @f() {\n  %1 = add i32\n}",
                           "define i32 @f() {\n  ret i32 %\n}", "%t = type {", "define i32 @f() {\n  br label\n}",
                           "define <4 x i32> @f() {\n}", "@s = constant [2 x i8] c\"a", ";;;\n\n\n define"};
    for (const char* c : cases) CHECK_THROWS_AS(ir::parse_module(c), ir::ParseError);
  }

  TEST_CASE("demo round-trips through the printer") {
    const auto m = ir::parse_module(demo_text(), "demo.ll");
    const auto text = ir::print_module(m);
    const auto again = ir::parse_module(text, "demo.ll");
    CHECK(again == m);
    CHECK(ir::print_module(again) == text);
  }

  TEST_CASE("fixture corpus round-trips") {
    for (const char* name : {"demo/demo.ll", "cg/cg.ll", "oob/oob.ll", "hang/hang.ll", "threshold/threshold.ll",
                             "stats/stats.ll"}) {
      CAPTURE(name);
      const auto parsed = ir::parse_file(test::fixture(name));
      CHECK(ir::validate(parsed.module).empty());
      CHECK(ir::parse_module(ir::print_module(parsed.module), parsed.module.source_name) == parsed.module);
    }
  }

  TEST_CASE("module without functions prints only a header comment") {
    const auto text = ir::print_module(ir::parse_module(""));
    CHECK(!text.empty());
    CHECK(text[0] == ';');
    CHECK(text.find('\n') == text.size() - 1);
  }

  TEST_CASE("indexed instructions carry an annotation comment") {
    const auto m = test::indexed_from_text("define void @f() {\n  ret void\n}\n");
    CHECK(ir::print_module(m).find("; !lcfi_index 1") != std::string::npos);
  }

  TEST_CASE("opaque and typed pointer spellings parse to the same shape") {
    const auto typed = ir::parse_module(
        "define i32 @f(i32* %p) {\n  %1 = load i32, i32* %p, align 4\n  ret i32 %1\n}\n");
    const auto opaque = ir::parse_module("define i32 @f(ptr %p) {\n  %1 = load i32, ptr %p, align 4\n  ret i32 %1\n}\n");
    CHECK(ir::validate(opaque).empty());
    REQUIRE(opaque.functions.size() == 1);
    CHECK(opaque.functions[0].params[0].type.is_pointer());
    CHECK(opaque.functions[0].blocks[0].instructions[0].type == typed.functions[0].blocks[0].instructions[0].type);
  }

  TEST_CASE("attributes and metadata are stripped with warnings") {
    const auto out = ir::parse_module_ex(demo_text(), "demo.ll");
    CHECK(!out.warnings.empty());
    for (const auto& w : out.warnings) CHECK(w.severity == ir::Severity::Warning);
  }

  TEST_CASE("500 generated modules round-trip") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      ModuleGen gen(seed);
      const auto text = gen.generate();
      CAPTURE(seed);
      CAPTURE(text);
      const auto m = ir::parse_module(text, "gen.ll");
      const auto diags = ir::validate(m);
      CHECK(diags.empty());
      const auto printed = ir::print_module(m);
      const auto back = ir::parse_module(printed, "gen.ll");
      CHECK(back == m);
      CHECK(ir::print_module(back) == printed);
    }
  }

  TEST_CASE("validate reports a missing terminator") {
    const auto m = ir::parse_module("define i32 @f() {\n  %1 = add i32 1, 2\n}\n");
    const auto d = ir::validate(m);
    REQUIRE(d.size() == 1);
    CHECK(d[0].message.find("missing terminator") != std::string::npos);
    CHECK(d[0].function == "f");
  }

  TEST_CASE("validate reports an unknown callee") {
    const auto m = ir::parse_module("define i32 @f() {\n  %1 = call i32 @foo()\n  ret i32 %1\n}\n");
    const auto d = ir::validate(m);
    REQUIRE(d.size() == 1);
    CHECK(d[0].message.find("unknown callee") != std::string::npos);
  }

  TEST_CASE("validate rejects use before definition within a block") {
    const auto m = ir::parse_module("define i32 @f() {\nentry:\n  %a = add i32 %b, 1\n  %b = add i32 1, 2\n  ret i32 %a\n}\n");
    CHECK(!ir::validate(m).empty());
  }

  TEST_CASE("duplicate function names are a parse error") {
    CHECK_THROWS_AS(ir::parse_module("define void @f() {\n  ret void\n}\ndefine void @f() {\n  ret void\n}\n"),
                    ir::ParseError);
  }

  TEST_CASE("def-use edge from a load to its compare") {
    const auto m = test::indexed_from_text(
        "define i32 @f() {\n  %i = alloca i32\n  %1 = load i32, i32* %i\n  %2 = icmp slt i32 %1, 3\n"
        "  store i32 1, i32* %i\n  ret i32 0\n}\n");
    const auto g = ir::build_def_use(m);
    CHECK(g.contains(2, 3));
    for (const auto& [p, c] : g.edges) CHECK(p != 4);
    CHECK(g.edges.size() == 3);
  }

  TEST_CASE("def-use edge count on the demo process function") {
    const auto m = test::indexed_from_text(demo_text());
    const auto g = ir::build_def_use(m);
    std::size_t in_process = 0;
    for (const auto& [p, c] : g.edges)
      if (p <= 26 && c <= 26) ++in_process;
    // Hand count over the demo IR: 12 single-use registers plus the allocas
    // %1 (2 uses), %ans (4) and %i (6).
    CHECK(in_process == 24);
    CHECK(g.contains(15, 16));
    CHECK(g.contains(18, 19));
    CHECK(g.contains(21, 22));
  }

  TEST_CASE("def-use requires indices") {
    CHECK_THROWS_AS(ir::build_def_use(ir::parse_module(demo_text())), ir::IndicesMissing);
  }

  TEST_CASE("loops of the demo process function") {
    const auto m = ir::parse_module(demo_text());
    const auto loops = ir::find_loops(*m.find_function("process"));
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].header == 1);
    CHECK(loops[0].blocks == std::set<std::size_t>{1, 2, 3});
    CHECK(!ir::innermost_loop(*m.find_function("process"), 4));
  }

  TEST_CASE("type layout") {
    ir::TypeTable table;
    table["struct.s"] = std::vector<ir::Type>{ir::Type::i32(), ir::Type::f64(), ir::Type::f64()};
    const auto s = ir::Type::named_struct("struct.s");
    CHECK(ir::size_of(s, table) == 24);
    CHECK(ir::field_offset(s, 1, table) == 8);
    CHECK(ir::size_of(ir::Type::pointer_to(ir::Type::i8()), table) == 8);
    CHECK(ir::size_of(ir::Type::array_of(3, ir::Type::f64()), table) == 24);
    CHECK(ir::size_of(ir::Type::i1(), table) == 1);
  }
}
