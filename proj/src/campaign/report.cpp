#include "lcfi/campaign/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lcfi::campaign {

using nlohmann::ordered_json;

double Report::percentage(OutcomeKind k) const {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(count(k)) / static_cast<double>(total);
}

void summarize(Report& report, const std::vector<MetricExtractor>& extractors,
               const std::map<std::string, std::optional<double>>& golden_metrics) {
  report.counts = {};
  for (const auto& r : report.runs) ++report.counts[static_cast<std::size_t>(r.outcome.kind)];
  report.metrics.clear();
  for (const auto& e : extractors) {
    MetricSummary s;
    s.name = e.name;
    s.transform = e.transform;
    if (auto g = golden_metrics.find(e.name); g != golden_metrics.end()) s.golden = g->second;
    double sum = 0;
    for (const auto& r : report.runs) {
      auto it = r.metrics.find(e.name);
      if (it == r.metrics.end() || !it->second) continue;
      const double v = *it->second;
      s.min = s.min ? std::min(*s.min, v) : v;
      s.max = s.max ? std::max(*s.max, v) : v;
      sum += v;
      ++s.count;
    }
    if (s.count) s.mean = sum / static_cast<double>(s.count);
    report.metrics.push_back(std::move(s));
  }
}

namespace {

std::string pct(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", p);
  std::string s(buf);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  return s + "%";
}

std::string num(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<double> get_opt(const ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string percentage_line(const Report& report) {
  std::string out;
  for (auto k : kOutcomeKinds) {
    if (report.count(k) == 0) continue;
    if (!out.empty()) out += " / ";
    out += std::string(outcome_kind_name(k)) + " " + pct(report.percentage(k));
  }
  return out.empty() ? "no runs" : out;
}

std::string render_text(const Report& r) {
  std::ostringstream os;
  os << "program: " << r.program << "\n";
  os << "fault: " << r.fault << "\n";
  os << "scope: " << r.scope << "\n";
  os << "seed: " << r.campaign_seed << "\n";
  os << "targets:";
  for (auto t : r.targets) os << " " << t;
  os << "\n";
  os << "runs: " << r.runs.size() << "\n";
  os << "golden instructions: " << r.golden_instructions << "\n\n";
  os << percentage_line(r) << "\n\n";
  for (auto k : kOutcomeKinds) {
    const double p = r.percentage(k);
    const auto bar = static_cast<std::size_t>(std::lround(p / 2.5));
    os << pad(std::string(outcome_kind_name(k)), 21) << pad(std::to_string(r.count(k)), 6)
       << pad(pct(p), 7) << " |" << std::string(bar, '#') << "\n";
  }
  if (!r.metrics.empty()) {
    os << "\nmetrics:\n";
    for (const auto& m : r.metrics) {
      os << "  " << m.name;
      if (m.transform == MetricTransform::NegLog10) os << " (neg_log10)";
      os << ": golden " << num(m.golden) << ", n " << m.count << ", min " << num(m.min) << ", max "
         << num(m.max) << ", mean " << num(m.mean) << "\n";
    }
  }
  os << "\nrun   seed                  outcome                      activations  instructions";
  for (const auto& m : r.metrics) os << "  " << m.name;
  os << "\n";
  for (const auto& run : r.runs) {
    os << pad(std::to_string(run.run_index), 6) << pad(std::to_string(run.seed), 22)
       << pad(outcome_label(run.outcome), 29) << pad(std::to_string(run.activation_count), 13)
       << run.instructions_executed;
    for (const auto& m : r.metrics) {
      auto it = run.metrics.find(m.name);
      os << "  " << (it == run.metrics.end() ? "-" : num(it->second));
    }
    os << "\n";
  }
  return os.str();
}

std::string render_json(const Report& r) {
  ordered_json j;
  j["program"] = r.program;
  j["fault"] = r.fault;
  j["scope"] = r.scope;
  j["campaign_seed"] = r.campaign_seed;
  j["golden_instructions"] = r.golden_instructions;
  j["targets"] = r.targets;
  ordered_json counts = ordered_json::object();
  ordered_json percentages = ordered_json::object();
  for (auto k : kOutcomeKinds) {
    counts[std::string(outcome_kind_name(k))] = r.count(k);
    percentages[std::string(outcome_kind_name(k))] = r.percentage(k);
  }
  j["counts"] = counts;
  j["percentages"] = percentages;
  ordered_json metrics = ordered_json::array();
  for (const auto& m : r.metrics) {
    metrics.push_back({{"name", m.name},
                       {"transform", std::string(transform_name(m.transform))},
                       {"golden", opt(m.golden)},
                       {"count", m.count},
                       {"min", opt(m.min)},
                       {"max", opt(m.max)},
                       {"mean", opt(m.mean)}});
  }
  j["metrics"] = metrics;
  ordered_json runs = ordered_json::array();
  for (const auto& run : r.runs) {
    ordered_json rm = ordered_json::object();
    for (const auto& [name, v] : run.metrics) rm[name] = opt(v);
    ordered_json o{{"run", run.run_index},
                   {"seed", run.seed},
                   {"outcome", std::string(outcome_kind_name(run.outcome.kind))},
                   {"trap", run.outcome.trap ? ordered_json(std::string(vm::trap_kind_name(*run.outcome.trap)))
                                             : ordered_json(nullptr)},
                   {"activations", run.activation_count},
                   {"instructions", run.instructions_executed},
                   {"metrics", rm},
                   {"std_output", run.std_output},
                   {"error_output", run.error_output},
                   {"prog_output", run.prog_output},
                   {"injection_log", run.injection_log},
                   {"trace", run.trace}};
    runs.push_back(std::move(o));
  }
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  try {
    const auto j = ordered_json::parse(text);
    Report r;
    r.program = j.at("program").get<std::string>();
    r.fault = j.at("fault").get<std::string>();
    r.scope = j.at("scope").get<std::string>();
    r.campaign_seed = j.at("campaign_seed").get<std::uint64_t>();
    r.golden_instructions = j.at("golden_instructions").get<std::uint64_t>();
    r.targets = j.at("targets").get<std::vector<std::uint64_t>>();
    for (auto k : kOutcomeKinds)
      r.counts[static_cast<std::size_t>(k)] = j.at("counts").at(std::string(outcome_kind_name(k))).get<std::uint64_t>();
    for (const auto& m : j.at("metrics")) {
      MetricSummary s;
      s.name = m.at("name").get<std::string>();
      s.transform = m.at("transform").get<std::string>() == "neg_log10" ? MetricTransform::NegLog10
                                                                        : MetricTransform::Identity;
      s.golden = get_opt(m.at("golden"));
      s.count = m.at("count").get<std::size_t>();
      s.min = get_opt(m.at("min"));
      s.max = get_opt(m.at("max"));
      s.mean = get_opt(m.at("mean"));
      r.metrics.push_back(std::move(s));
    }
    for (const auto& o : j.at("runs")) {
      RunResult run;
      run.run_index = o.at("run").get<std::uint64_t>();
      run.seed = o.at("seed").get<std::uint64_t>();
      auto kind = outcome_kind_from_name(o.at("outcome").get<std::string>());
      if (!kind) throw Error("unknown outcome '" + o.at("outcome").get<std::string>() + "'");
      run.outcome.kind = *kind;
      if (!o.at("trap").is_null()) {
        auto t = vm::trap_kind_from_name(o.at("trap").get<std::string>());
        if (!t) throw Error("unknown trap kind '" + o.at("trap").get<std::string>() + "'");
        run.outcome.trap = *t;
      }
      run.activation_count = o.at("activations").get<std::uint64_t>();
      run.instructions_executed = o.at("instructions").get<std::uint64_t>();
      for (const auto& [name, v] : o.at("metrics").items()) run.metrics[name] = get_opt(v);
      run.std_output = o.at("std_output").get<std::string>();
      run.error_output = o.at("error_output").get<std::string>();
      run.prog_output = o.at("prog_output").get<std::string>();
      run.injection_log = o.at("injection_log").get<std::string>();
      run.trace = o.at("trace").get<std::string>();
      r.runs.push_back(std::move(run));
    }
    return r;
  } catch (const ordered_json::exception& e) {
    throw Error(std::string("malformed report json: ") + e.what());
  }
}

std::string render_csv(const Report& r) {
  std::ostringstream os;
  os << "run,seed,outcome,trap,activations,instructions";
  for (const auto& m : r.metrics) os << "," << m.name;
  os << "\n";
  for (const auto& run : r.runs) {
    os << run.run_index << "," << run.seed << "," << outcome_kind_name(run.outcome.kind) << ","
       << (run.outcome.trap ? std::string(vm::trap_kind_name(*run.outcome.trap)) : "") << ","
       << run.activation_count << "," << run.instructions_executed;
    for (const auto& m : r.metrics) {
      auto it = run.metrics.find(m.name);
      os << ",";
      if (it != run.metrics.end() && it->second) os << num(it->second);
    }
    os << "\n";
  }
  return os.str();
}

void write_report(const Report& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto put = [&](const char* name, const std::string& text) {
    const auto path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
  };
  put("report.txt", render_text(report));
  put("report.json", render_json(report));
  put("report.csv", render_csv(report));
}

}  // namespace lcfi::campaign
