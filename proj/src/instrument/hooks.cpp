#include "lcfi/instrument/hooks.hpp"

#include <filesystem>
#include <fstream>

#include "lcfi/ir/def_use.hpp"
#include "lcfi/ir/parser.hpp"
#include "lcfi/ir/printer.hpp"

namespace lcfi::instrument {

namespace {

constexpr std::string_view kTrace = "!lcfi_trace";
constexpr std::string_view kInject = "!lcfi_inject";

bool traceable(const ir::Instruction& i) { return i.has_result() || i.opcode == ir::Opcode::Store; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

}  // namespace

InstrumentedModule insert_hooks(const ir::IrModule& indexed, HookMode mode, const InjectionPlan* plan) {
  if (!indexed.fully_indexed()) throw ir::IndicesMissing();
  InstrumentedModule out;
  out.module = indexed;
  out.mode = mode;
  if (mode == HookMode::Plain) return out;

  std::set<ir::InstructionIndex> all;
  for (const auto& f : indexed.functions)
    for (const auto& b : f.blocks)
      for (const auto& i : b.instructions) {
        all.insert(*i.index);
        if (traceable(i)) out.trace_points.insert(*i.index);
      }
  if (mode == HookMode::Injection && plan) {
    for (const auto& t : plan->targets) {
      if (!all.count(t.index)) throw Error("injection target " + std::to_string(t.index) + " is not in the module");
      out.inject_points.insert(t.index);
    }
  }
  return out;
}

std::string print_instrumented(const InstrumentedModule& m) {
  ir::PrintOptions opts;
  opts.markers = [&m](ir::InstructionIndex idx) {
    std::string s;
    if (m.traced(idx)) s += kTrace;
    if (m.injected(idx)) {
      if (!s.empty()) s += ' ';
      s += kInject;
    }
    return s;
  };
  return ir::print_module(m.module, opts);
}

InstrumentedModule parse_instrumented(std::string_view text, std::string_view source_name) {
  auto parsed = ir::parse_module_ex(text, source_name);
  InstrumentedModule out;
  out.module = std::move(parsed.module);
  for (const auto& [idx, words] : parsed.markers)
    for (const auto& w : words) {
      if (w == kTrace) out.trace_points.insert(idx);
      if (w == kInject) out.inject_points.insert(idx);
    }
  if (!out.inject_points.empty())
    out.mode = HookMode::Injection;
  else if (!out.trace_points.empty())
    out.mode = HookMode::Profiling;
  return out;
}

ArtifactPaths write_artifacts(const ir::IrModule& indexed, const InjectionPlan& plan, const std::string& dir,
                              const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / stem;
  ArtifactPaths paths{base.string() + "-lcfi_index.ll", base.string() + "-lcfi_profiling.ll",
                      base.string() + "-lcfi_fi.ll"};
  write_file(paths.index, print_instrumented(insert_hooks(indexed, HookMode::Plain)));
  write_file(paths.profiling, print_instrumented(insert_hooks(indexed, HookMode::Profiling)));
  write_file(paths.fi, print_instrumented(insert_hooks(indexed, HookMode::Injection, &plan)));
  return paths;
}

}  // namespace lcfi::instrument
