#include "lcfi/campaign/campaign.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lcfi/instrument/hooks.hpp"
#include "lcfi/instrument/indexing.hpp"
#include "lcfi/ir/parser.hpp"
#include "lcfi/ir/validate.hpp"

namespace lcfi::campaign {

namespace fs = std::filesystem;

std::uint64_t run_seed(std::uint64_t campaign_seed, std::uint64_t run, std::int64_t seed_salt) {
  return fault::mix64(campaign_seed, run, static_cast<std::uint64_t>(seed_salt));
}

namespace {

void put(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string injection_log(const RunResult& r, const vm::RunOutcome& out) {
  std::ostringstream os;
  os << "run " << r.run_index << " seed " << r.seed << "\n";
  for (const auto& a : out.activations) {
    os << "fault injected: ID " << a.index << " occurrence " << a.occurrence;
    if (a.trace_position) os << " trace #" << *a.trace_position;
    os << " original " << hex(a.original_bits) << " faulted " << hex(a.faulted_bits) << " error " << g17(a.error)
       << " limit " << g17(a.limit) << "\n";
  }
  for (const auto& line : out.log) os << line << "\n";
  os << "activations: " << out.activation_count << "\n";
  os << "status: " << vm::run_status_name(out.status) << "\n";
  os << "outcome: " << outcome_label(r.outcome) << "\n";
  return os.str();
}

// Host files are read once so every run sees the same bytes.
vm::IoConfig preload(const vm::IoConfig& io) {
  vm::IoConfig out;
  if (io.stdin_text) out.stdin_text = io.stdin_text;
  else if (io.stdin_path) out.stdin_text = slurp(*io.stdin_path);
  for (const auto& [name, host] : io.files) out.contents[name] = slurp(host);
  for (const auto& [name, bytes] : io.contents) out.contents[name] = bytes;
  return out;
}

std::string scope_text(const instrument::OccurrenceScope& s) {
  std::string out(instrument::scope_mode_name(s.mode));
  out += " k=";
  for (std::size_t i = 0; i < s.k.size(); ++i) out += (i ? "," : "") + std::to_string(s.k[i]);
  return out;
}

}  // namespace

Report run_campaign(const CampaignConfig& config, const CampaignOptions& options) {
  check_config(config);
  auto parsed = ir::parse_file(config.program);
  std::string problems;
  for (const auto& d : ir::validate(parsed.module))
    if (d.severity == ir::Severity::Error) problems += "\n  " + ir::format_diagnostic(d, config.program);
  if (!problems.empty()) throw Error("invalid module:" + problems);

  const auto indexed = instrument::assign_indices(std::move(parsed.module));
  const auto plan = instrument::resolve_targets(indexed, config.input);

  const fs::path root(config.output_dir);
  const fs::path llfi = root / "llfi";
  fs::create_directories(llfi);
  const auto stem = fs::path(config.program).stem().string();
  instrument::write_artifacts(indexed, plan, root.string(), stem);

  const auto profiling = instrument::insert_hooks(indexed, instrument::HookMode::Profiling);
  const auto fi = instrument::insert_hooks(indexed, instrument::HookMode::Injection, &plan);
  const auto io = preload(config.io);
  vm::ExecOptions exec;
  exec.budget = config.budget;
  exec.trace = config.trace;

  const auto golden = vm::execute(profiling, io, nullptr, nullptr, exec);
  if (golden.status != vm::RunStatus::Completed) {
    std::string why(vm::run_status_name(golden.status));
    if (golden.trap) why += ", " + std::string(vm::trap_kind_name(golden.trap->kind)) + ": " + golden.trap->message;
    throw GoldenRunFailed("golden run did not complete (" + why + ")");
  }
  put(llfi / "baseline" / "golden_std_output", golden.stdout_text);
  if (golden.trace) put(llfi / "baseline" / "llfi.stat.trace.prof.txt", trace::format_trace(*golden.trace));
  for (const auto& [name, bytes] : golden.output_files) put(llfi / "baseline" / name, bytes);

  std::map<std::string, std::optional<double>> golden_metrics;
  for (const auto& e : config.metrics) {
    try {
      golden_metrics[e.name] = extract_metric(golden, e);
    } catch (const NonPositiveForLog&) {
      golden_metrics[e.name] = std::nullopt;
    }
  }

  const auto compare = compare_options(config);
  std::vector<RunResult> results(config.runs);
  std::atomic<std::uint64_t> next{0};
  std::mutex callback_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  for (const char* d : {"std_output", "error_output", "prog_output", "llfi_stat_output"})
    fs::create_directories(llfi / d);

  const auto run_one = [&](std::uint64_t i) {
    RunResult r;
    r.run_index = i;
    r.seed = run_seed(config.campaign_seed, i, plan.fault.seed_salt);
    fault::Sampler sampler(plan.fault, r.seed);
    const auto out = vm::execute(fi, io, &plan, &sampler, exec);
    r.outcome = classify_outcome(out, golden, out.activation_count, compare);
    r.activation_count = out.activation_count;
    r.instructions_executed = out.instructions_executed;
    if (out.status == vm::RunStatus::Completed) {
      for (const auto& e : config.metrics) {
        try {
          r.metrics[e.name] = extract_metric(out, e);
        } catch (const NonPositiveForLog&) {
          r.metrics[e.name] = std::nullopt;
        }
      }
    }
    const std::string tag = std::to_string(i) + "-0";
    r.std_output = "llfi/std_output/std_outputfile-run-" + tag;
    put(root / r.std_output, out.stdout_text);
    r.prog_output = "llfi/prog_output/run-" + tag;
    fs::create_directories(root / r.prog_output);
    for (const auto& [name, bytes] : out.output_files) put(root / r.prog_output / name, bytes);
    std::string err = out.stderr_text;
    if (out.trap) {
      err += "trap: " + std::string(vm::trap_kind_name(out.trap->kind)) + " at ID " + std::to_string(out.trap->index) +
             " (execution " + std::to_string(out.trap->occurrence) + "): " + out.trap->message + "\n";
    }
    if (out.status == vm::RunStatus::BudgetExhausted)
      err += "hang: instruction budget of " + std::to_string(config.budget) + " exhausted\n";
    if (!err.empty()) {
      r.error_output = "llfi/error_output/errorfile-run-" + tag;
      put(root / r.error_output, err);
    }
    r.injection_log = "llfi/llfi_stat_output/llfi.stat.fi.injectedfaults." + tag + ".txt";
    put(root / r.injection_log, injection_log(r, out));
    if (out.trace) {
      r.trace = "llfi/llfi_stat_output/llfi.stat.trace." + tag + ".txt";
      put(root / r.trace, trace::format_trace(*out.trace));
    }
    if (options.on_run) {
      std::lock_guard lock(callback_mutex);
      options.on_run(r);
    }
    results[i] = std::move(r);
  };

  const auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= config.runs) return;
      try {
        run_one(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(config.runs);
        return;
      }
    }
  };

  const unsigned jobs = static_cast<unsigned>(
      std::min<std::uint64_t>(options.jobs ? options.jobs : config.jobs, config.runs));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Report report;
  report.program = fs::path(config.program).filename().string();
  report.fault = fault::format_fault_spec(plan.fault);
  report.scope = scope_text(plan.scope);
  report.campaign_seed = config.campaign_seed;
  report.golden_instructions = golden.instructions_executed;
  for (const auto& t : plan.targets) report.targets.push_back(t.index);
  report.runs = std::move(results);
  summarize(report, config.metrics, golden_metrics);
  write_report(report, root.string());
  return report;
}

}  // namespace lcfi::campaign
