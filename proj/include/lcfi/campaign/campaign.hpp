#pragma once

#include <functional>
#include <string>

#include "lcfi/campaign/classify.hpp"
#include "lcfi/campaign/config.hpp"
#include "lcfi/campaign/metrics.hpp"
#include "lcfi/campaign/report.hpp"

namespace lcfi::campaign {

struct CampaignOptions {
  unsigned jobs = 0;  // 0: use config.jobs
  // Called once per finished run, from worker threads.
  std::function<void(const RunResult&)> on_run;
};

// Parses and indexes the program, resolves targets, writes the instrumented
// variants, runs the golden profile once and `runs` injection runs, then writes
// the result tree and report.{txt,json,csv} under config.output_dir:
//   llfi/baseline/{golden_std_output, llfi.stat.trace.prof.txt, <files>}
//   llfi/std_output/std_outputfile-run-<i>-0
//   llfi/error_output/errorfile-run-<i>-0
//   llfi/prog_output/run-<i>-0/<files>
//   llfi/llfi_stat_output/llfi.stat.fi.injectedfaults.<i>-0.txt
//   llfi/llfi_stat_output/llfi.stat.trace.<i>-0.txt
// Throws GoldenRunFailed, ResolveError, ir::ParseError and Error.
Report run_campaign(const CampaignConfig& config, const CampaignOptions& options = {});

// Seed of injection run `run`.
std::uint64_t run_seed(std::uint64_t campaign_seed, std::uint64_t run, std::int64_t seed_salt);

}  // namespace lcfi::campaign
