#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lcfi/campaign/campaign.hpp"
#include "lcfi/instrument/hooks.hpp"
#include "lcfi/instrument/indexing.hpp"
#include "lcfi/ir/def_use.hpp"
#include "lcfi/ir/parser.hpp"
#include "lcfi/ir/validate.hpp"
#include "lcfi/trace/diff.hpp"
#include "lcfi/trace/propagation.hpp"
#include "lcfi/trace/union.hpp"

namespace fs = std::filesystem;
using namespace lcfi;

namespace {

constexpr int kExitError = 2;
constexpr int kExitGolden = 3;
constexpr int kExitConfig = 4;

ir::IrModule load_indexed(const std::string& path) {
  auto parsed = ir::parse_file(path);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << ir::format_diagnostic(w, path) << "\n";
  std::string problems;
  for (const auto& d : ir::validate(parsed.module))
    if (d.severity == ir::Severity::Error) problems += "\n  " + ir::format_diagnostic(d, path);
  if (!problems.empty()) throw Error("invalid module:" + problems);
  return instrument::assign_indices(std::move(parsed.module));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

struct IoArgs {
  std::string stdin_path;
  std::vector<std::string> files;  // name=path
  std::uint64_t budget = 100'000'000;
  std::string out_dir = ".";

  void add(CLI::App* cmd) {
    cmd->add_option("--stdin", stdin_path, "File fed to the program's stdin")->check(CLI::ExistingFile);
    cmd->add_option("--file", files, "Program-visible file as NAME=HOST_PATH");
    cmd->add_option("--budget", budget, "Instruction budget");
    cmd->add_option("--out-dir", out_dir, "Directory for outputs and traces");
  }

  vm::IoConfig io() const {
    vm::IoConfig c;
    if (!stdin_path.empty()) c.stdin_path = stdin_path;
    for (const auto& f : files) {
      const auto eq = f.find('=');
      if (eq == std::string::npos) throw ConfigError("--file", "expected NAME=HOST_PATH, got '" + f + "'");
      c.files[f.substr(0, eq)] = f.substr(eq + 1);
    }
    return c;
  }
};

int report_run(const vm::RunOutcome& out, const std::string& dir, const std::string& trace_name) {
  std::cout << out.stdout_text << std::flush;
  std::cerr << out.stderr_text;
  fs::create_directories(dir);
  for (const auto& [name, bytes] : out.output_files) write_file((fs::path(dir) / name).string(), bytes);
  if (out.trace) write_file((fs::path(dir) / trace_name).string(), trace::format_trace(*out.trace));
  for (const auto& line : out.log) std::cerr << line << "\n";
  switch (out.status) {
    case vm::RunStatus::Completed:
      return out.exit_code & 0xff;
    case vm::RunStatus::Trapped:
      std::cerr << "trap: " << vm::trap_kind_name(out.trap->kind) << " at ID " << out.trap->index << ": "
                << out.trap->message << "\n";
      return kExitError;
    case vm::RunStatus::BudgetExhausted:
      std::cerr << "hang: instruction budget exhausted\n";
      return kExitError;
  }
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-bounded fault injection for LLVM IR programs"};
  app.require_subcommand(1);

  std::string program, input_path, config_path;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  IoArgs io_args;

  auto* instrument_cmd = app.add_subcommand("instrument", "Write the indexed, profiling and injection variants");
  instrument_cmd->add_option("program", program, "Program .ll")->required()->check(CLI::ExistingFile);
  instrument_cmd->add_option("--input", input_path, "input.yaml")->required()->check(CLI::ExistingFile);
  instrument_cmd->add_option("--out-dir", io_args.out_dir, "Output directory");

  auto* profile_cmd = app.add_subcommand("profile", "Golden run with tracing");
  profile_cmd->add_option("program", program, "Program .ll")->required()->check(CLI::ExistingFile);
  io_args.add(profile_cmd);

  auto* inject_cmd = app.add_subcommand("inject", "One injection run");
  inject_cmd->add_option("program", program, "Program .ll")->required()->check(CLI::ExistingFile);
  inject_cmd->add_option("--input", input_path, "input.yaml")->required()->check(CLI::ExistingFile);
  inject_cmd->add_option("--seed", seed, "Run seed");
  io_args.add(inject_cmd);

  auto* campaign_cmd = app.add_subcommand("campaign", "Golden run plus seeded injection runs");
  campaign_cmd->add_option("--config", config_path, "campaign.yaml")->required()->check(CLI::ExistingFile);
  campaign_cmd->add_option("--jobs", jobs, "Parallel runs (overrides the config)");

  auto* trace_cmd = app.add_subcommand("trace", "Trace analysis");
  trace_cmd->require_subcommand(1);
  std::string golden_path, faulty_path;
  std::vector<std::string> union_paths;
  bool outputs_equal = false;
  auto* diff_cmd = trace_cmd->add_subcommand("diff", "Align two traces and report divergences");
  diff_cmd->add_option("golden", golden_path)->required()->check(CLI::ExistingFile);
  diff_cmd->add_option("faulty", faulty_path)->required()->check(CLI::ExistingFile);
  auto* union_cmd = trace_cmd->add_subcommand("union", "Merge traces by instruction index");
  union_cmd->add_option("traces", union_paths)->required()->check(CLI::ExistingFile);
  auto* dot_cmd = trace_cmd->add_subcommand("dot", "Fault propagation graph in DOT");
  dot_cmd->add_option("golden", golden_path)->required()->check(CLI::ExistingFile);
  dot_cmd->add_option("faulty", faulty_path)->required()->check(CLI::ExistingFile);
  dot_cmd->add_option("--program", program, "Program .ll the traces came from")->required()->check(CLI::ExistingFile);
  dot_cmd->add_flag("--outputs-equal", outputs_equal, "The faulty run's outputs matched golden");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  try {
    if (*instrument_cmd) {
      const auto indexed = load_indexed(program);
      const auto input = instrument::load_input_yaml(input_path);
      for (const auto& w : input.warnings) std::cerr << "warning: " << w << "\n";
      const auto plan = instrument::resolve_targets(indexed, input);
      fs::create_directories(io_args.out_dir);
      const auto paths =
          instrument::write_artifacts(indexed, plan, io_args.out_dir, fs::path(program).stem().string());
      std::cout << paths.index << "\n" << paths.profiling << "\n" << paths.fi << "\n";
      std::cout << "targets:";
      for (const auto& t : plan.targets) std::cout << " " << t.index;
      std::cout << "\n";
      return 0;
    }
    if (*profile_cmd) {
      const auto indexed = load_indexed(program);
      const auto m = instrument::insert_hooks(indexed, instrument::HookMode::Profiling);
      vm::ExecOptions opts;
      opts.budget = io_args.budget;
      const auto out = vm::execute(m, io_args.io(), nullptr, nullptr, opts);
      return report_run(out, io_args.out_dir, "llfi.stat.trace.prof.txt");
    }
    if (*inject_cmd) {
      const auto indexed = load_indexed(program);
      const auto input = instrument::load_input_yaml(input_path);
      for (const auto& w : input.warnings) std::cerr << "warning: " << w << "\n";
      const auto plan = instrument::resolve_targets(indexed, input);
      const auto m = instrument::insert_hooks(indexed, instrument::HookMode::Injection, &plan);
      fault::Sampler sampler(plan.fault, seed);
      vm::ExecOptions opts;
      opts.budget = io_args.budget;
      const auto out = vm::execute(m, io_args.io(), &plan, &sampler, opts);
      for (const auto& a : out.activations) {
        std::fprintf(stderr, "fault injected: ID %u occurrence %llu original %016llx faulted %016llx\n",
                     static_cast<unsigned>(a.index), static_cast<unsigned long long>(a.occurrence),
                     static_cast<unsigned long long>(a.original_bits),
                     static_cast<unsigned long long>(a.faulted_bits));
      }
      return report_run(out, io_args.out_dir, "llfi.stat.trace.0-0.txt");
    }
    if (*campaign_cmd) {
      const auto config = campaign::load_config(config_path);
      for (const auto& w : config.warnings) std::cerr << "warning: " << w << "\n";
      campaign::CampaignOptions opts;
      opts.jobs = jobs;
      const auto report = campaign::run_campaign(config, opts);
      std::cout << campaign::percentage_line(report) << "\n";
      std::cout << "report: " << (fs::path(config.output_dir) / "report.txt").string() << "\n";
      return 0;
    }
    if (*diff_cmd) {
      const auto report = trace::trace_diff(trace::read_trace(golden_path), trace::read_trace(faulty_path));
      std::cout << trace::format_diff(report);
      return report.classification == trace::DiffClass::Identical ? 0 : 1;
    }
    if (*union_cmd) {
      std::vector<trace::Trace> traces;
      for (const auto& p : union_paths) traces.push_back(trace::read_trace(p));
      std::cout << trace::format_union(trace::trace_union(traces));
      return 0;
    }
    if (*dot_cmd) {
      const auto indexed = load_indexed(program);
      const auto diff = trace::trace_diff(trace::read_trace(golden_path), trace::read_trace(faulty_path));
      const auto graph = trace::build_propagation(diff, indexed, ir::build_def_use(indexed), outputs_equal);
      std::cout << trace::trace_to_dot(graph);
      return 0;
    }
  } catch (const campaign::GoldenRunFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGolden;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const instrument::ResolveError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ir::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
