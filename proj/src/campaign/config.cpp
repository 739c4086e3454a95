#include "lcfi/campaign/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace lcfi::campaign {

std::string_view transform_name(MetricTransform t) {
  return t == MetricTransform::NegLog10 ? "neg_log10" : "identity";
}

namespace {

namespace fs = std::filesystem;

template <typename T>
T as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "invalid value");
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() ? (fs::path(base) / path).lexically_normal().string() : p;
}

void warn_unknown(const YAML::Node& map, const std::set<std::string>& known, const std::string& prefix,
                  std::vector<std::string>& warnings) {
  for (const auto& kv : map) {
    const auto k = kv.first.as<std::string>();
    if (!known.count(k)) warnings.push_back("unknown key '" + prefix + k + "' ignored");
  }
}

}  // namespace

void check_config(const CampaignConfig& c) {
  if (c.runs < 1) throw ConfigError("runs", "must be >= 1");
  if (c.budget < 1) throw ConfigError("budget", "must be >= 1");
  if (c.jobs < 1) throw ConfigError("jobs", "must be >= 1");
  std::set<std::string> names;
  for (std::size_t i = 0; i < c.metrics.size(); ++i) {
    const auto& m = c.metrics[i];
    const std::string key = "metrics[" + std::to_string(i) + "]";
    if (m.name.empty()) throw ConfigError(key + ".name", "missing");
    if (!names.insert(m.name).second) throw ConfigError(key + ".name", "duplicate metric '" + m.name + "'");
    std::regex re;
    try {
      re = std::regex(m.pattern);
    } catch (const std::regex_error& e) {
      throw ConfigError(key + ".pattern", std::string("invalid regular expression: ") + e.what());
    }
    if (re.mark_count() != 1)
      throw ConfigError(key + ".pattern", "must have exactly one capture group, found " +
                                              std::to_string(re.mark_count()));
    if (m.source == MetricSource::OutputFile && m.file.empty()) throw ConfigError(key + ".file", "missing");
  }
  for (std::size_t i = 0; i < c.compare_outputs.size(); ++i)
    if (c.compare_outputs[i].tolerance < 0)
      throw ConfigError("compare_outputs[" + std::to_string(i) + "].tolerance", "must be >= 0");
}

CampaignConfig parse_campaign_yaml(std::string_view text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("malformed YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("", "campaign config must be a YAML mapping");

  CampaignConfig c;
  warn_unknown(root,
               {"program", "input", "runs", "seed", "budget", "jobs", "trace", "io", "metrics", "compare_stdout",
                "stdout_tolerance", "compare_outputs", "output_dir"},
               "", c.warnings);

  if (!root["program"]) throw ConfigError("program", "missing");
  c.program = resolve(base_dir, as<std::string>(root["program"], "program"));
  if (!fs::exists(c.program)) throw ConfigError("program", "file not found: " + c.program);
  if (!root["input"]) throw ConfigError("input", "missing");
  c.input_yaml = resolve(base_dir, as<std::string>(root["input"], "input"));
  if (!fs::exists(c.input_yaml)) throw ConfigError("input", "file not found: " + c.input_yaml);
  c.input = instrument::load_input_yaml(c.input_yaml);
  for (const auto& w : c.input.warnings) c.warnings.push_back("input: " + w);

  if (root["runs"]) {
    const auto r = as<long long>(root["runs"], "runs");
    if (r < 1) throw ConfigError("runs", "must be >= 1");
    c.runs = static_cast<std::uint64_t>(r);
  }
  if (root["seed"]) c.campaign_seed = as<std::uint64_t>(root["seed"], "seed");
  else if (c.input.seed) c.campaign_seed = *c.input.seed;
  if (root["budget"]) {
    const auto b = as<long long>(root["budget"], "budget");
    if (b < 1) throw ConfigError("budget", "must be >= 1");
    c.budget = static_cast<std::uint64_t>(b);
  }
  if (root["jobs"]) {
    const auto j = as<long long>(root["jobs"], "jobs");
    if (j < 1) throw ConfigError("jobs", "must be >= 1");
    c.jobs = static_cast<unsigned>(j);
  }
  if (root["trace"]) c.trace = as<bool>(root["trace"], "trace");

  if (const auto io = root["io"]) {
    if (!io.IsMap()) throw ConfigError("io", "expected a mapping");
    warn_unknown(io, {"stdin", "files"}, "io.", c.warnings);
    if (io["stdin"]) {
      c.io.stdin_path = resolve(base_dir, as<std::string>(io["stdin"], "io.stdin"));
      if (!fs::exists(*c.io.stdin_path)) throw ConfigError("io.stdin", "file not found: " + *c.io.stdin_path);
    }
    if (const auto files = io["files"]) {
      if (!files.IsMap()) throw ConfigError("io.files", "expected a mapping of program names to host paths");
      for (const auto& kv : files) {
        const auto name = kv.first.as<std::string>();
        const auto host = resolve(base_dir, as<std::string>(kv.second, "io.files." + name));
        if (!fs::exists(host)) throw ConfigError("io.files." + name, "file not found: " + host);
        c.io.files[name] = host;
      }
    }
  }

  if (const auto ms = root["metrics"]) {
    if (!ms.IsSequence()) throw ConfigError("metrics", "expected a list");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string key = "metrics[" + std::to_string(i) + "]";
      const auto& m = ms[i];
      if (!m.IsMap()) throw ConfigError(key, "expected a mapping");
      warn_unknown(m, {"name", "pattern", "source", "file", "transform", "match"}, key + ".", c.warnings);
      MetricExtractor e;
      if (m["name"]) e.name = as<std::string>(m["name"], key + ".name");
      if (!m["pattern"]) throw ConfigError(key + ".pattern", "missing");
      e.pattern = as<std::string>(m["pattern"], key + ".pattern");
      if (m["source"]) {
        const auto s = as<std::string>(m["source"], key + ".source");
        if (s == "stdout") e.source = MetricSource::Stdout;
        else if (s == "output_file") e.source = MetricSource::OutputFile;
        else throw ConfigError(key + ".source", "expected stdout or output_file");
      }
      if (m["file"]) e.file = as<std::string>(m["file"], key + ".file");
      if (m["transform"]) {
        const auto t = as<std::string>(m["transform"], key + ".transform");
        if (t == "identity") e.transform = MetricTransform::Identity;
        else if (t == "neg_log10") e.transform = MetricTransform::NegLog10;
        else throw ConfigError(key + ".transform", "expected identity or neg_log10");
      }
      if (m["match"]) {
        const auto p = as<std::string>(m["match"], key + ".match");
        if (p == "last") e.pick = MatchPick::Last;
        else if (p == "first") e.pick = MatchPick::First;
        else throw ConfigError(key + ".match", "expected first or last");
      }
      c.metrics.push_back(std::move(e));
    }
  }

  if (root["compare_stdout"]) c.compare_stdout = as<bool>(root["compare_stdout"], "compare_stdout");
  if (root["stdout_tolerance"]) c.stdout_tolerance = as<double>(root["stdout_tolerance"], "stdout_tolerance");
  if (c.stdout_tolerance < 0) throw ConfigError("stdout_tolerance", "must be >= 0");
  if (const auto co = root["compare_outputs"]) {
    if (!co.IsSequence()) throw ConfigError("compare_outputs", "expected a list");
    for (std::size_t i = 0; i < co.size(); ++i) {
      const std::string key = "compare_outputs[" + std::to_string(i) + "]";
      OutputCompare oc;
      if (co[i].IsScalar()) {
        oc.file = as<std::string>(co[i], key);
      } else if (co[i].IsMap()) {
        if (!co[i]["file"]) throw ConfigError(key + ".file", "missing");
        oc.file = as<std::string>(co[i]["file"], key + ".file");
        if (co[i]["tolerance"]) oc.tolerance = as<double>(co[i]["tolerance"], key + ".tolerance");
      } else {
        throw ConfigError(key, "expected a file name or {file, tolerance}");
      }
      c.compare_outputs.push_back(std::move(oc));
    }
  }

  c.output_dir = root["output_dir"] ? resolve(base_dir, as<std::string>(root["output_dir"], "output_dir"))
                                    : (fs::current_path() / "lcfi_out").string();
  check_config(c);
  return c;
}

CampaignConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = fs::path(path).parent_path();
  return parse_campaign_yaml(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace lcfi::campaign
