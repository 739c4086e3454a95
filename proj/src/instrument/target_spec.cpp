#include "lcfi/instrument/target_spec.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace lcfi::instrument {

std::string_view scope_mode_name(ScopeMode mode) {
  switch (mode) {
    case ScopeMode::NthExecution: return "nth_execution";
    case ScopeMode::LoopIteration: return "loop_iteration";
    case ScopeMode::Invocation: return "invocation";
  }
  return "?";
}

std::optional<ScopeMode> scope_mode_from_name(std::string_view name) {
  if (name == "nth_execution") return ScopeMode::NthExecution;
  if (name == "loop_iteration") return ScopeMode::LoopIteration;
  if (name == "invocation") return ScopeMode::Invocation;
  return std::nullopt;
}

bool OccurrenceScope::matches(std::uint64_t occurrence) const {
  return std::find(k.begin(), k.end(), occurrence) != k.end();
}

OccurrenceScope InputConfig::scope() const {
  const bool looped = std::any_of(options.begin(), options.end(),
                                  [](const TargetSpec& t) { return t.in_loop; });
  if (!looped) return {ScopeMode::NthExecution, {1}};
  return {loop_mode, loop_num};
}

bool InjectionPlan::targets_index(ir::InstructionIndex idx) const {
  return std::any_of(targets.begin(), targets.end(),
                     [idx](const Target& t) { return t.index == idx; });
}

void check_target_spec(const TargetSpec& spec, std::size_t position) {
  const std::string key = "option[" + std::to_string(position) + "]";
  if (spec.function_name.empty()) throw ConfigError(key + ".function_name", "missing");
  if (spec.variable_name.empty()) throw ConfigError(key + ".variable_name", "missing");
  if (spec.function_name == "main") {
    throw ResolveError(ResolveError::Kind::MainFunctionRejected,
                       key + ".function_name: faults cannot be injected into variables of main");
  }
  if (spec.variable_location < 1) throw ConfigError(key + ".variable_location", "must be >= 1");
}

namespace {

template <typename T>
T scalar_as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key, "invalid value '" + (node.IsScalar() ? node.Scalar() : std::string("<node>")) + "'");
  }
}

std::uint64_t positive(const YAML::Node& node, const std::string& key) {
  const auto v = scalar_as<long long>(node, key);
  if (v < 1) throw ConfigError(key, "must be >= 1");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

InputConfig parse_input_yaml(std::string_view text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("malformed YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("", "input must be a YAML mapping");

  static const std::set<std::string> kTopKeys = {
      "variable_num", "loop_num", "fi_type", "option", "loop_mode",
      "seed",         "sigma_ratio", "truncate", "seed_salt",
  };
  static const std::set<std::string> kOptionKeys = {
      "function_name", "variable_name", "variable_init", "variable_location", "in_arr", "in_loop",
  };

  InputConfig cfg;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!kTopKeys.count(key)) cfg.warnings.push_back("unknown key '" + key + "' ignored");
  }

  if (!root["fi_type"]) throw ConfigError("fi_type", "missing");
  try {
    cfg.fault = fault::parse_fault_spec(scalar_as<std::string>(root["fi_type"], "fi_type"));
  } catch (const fault::FaultError& e) {
    throw ConfigError("fi_type", e.what());
  }
  if (root["sigma_ratio"]) cfg.fault.sigma_ratio = scalar_as<double>(root["sigma_ratio"], "sigma_ratio");
  if (root["truncate"]) cfg.fault.truncate = scalar_as<bool>(root["truncate"], "truncate");
  if (root["seed_salt"]) cfg.fault.seed_salt = scalar_as<long long>(root["seed_salt"], "seed_salt");
  try {
    fault::check_fault_spec(cfg.fault);
  } catch (const fault::FaultError& e) {
    throw ConfigError("sigma_ratio", e.what());
  }
  if (cfg.fault.distribution == fault::Distribution::Empirical) {
    std::filesystem::path p(cfg.fault.empirical_path);
    if (p.is_relative()) cfg.fault.empirical_path = (std::filesystem::path(base_dir) / p).string();
  }
  if (root["seed"]) cfg.seed = scalar_as<std::uint64_t>(root["seed"], "seed");

  if (const auto lm = root["loop_mode"]) {
    auto mode = scope_mode_from_name(scalar_as<std::string>(lm, "loop_mode"));
    if (!mode) throw ConfigError("loop_mode", "expected nth_execution, loop_iteration or invocation");
    cfg.loop_mode = *mode;
  }
  if (const auto ln = root["loop_num"]) {
    if (ln.IsSequence()) {
      for (std::size_t i = 0; i < ln.size(); ++i) {
        cfg.loop_num.push_back(positive(ln[i], "loop_num[" + std::to_string(i) + "]"));
      }
      if (cfg.loop_num.empty()) throw ConfigError("loop_num", "empty list");
    } else {
      cfg.loop_num.push_back(positive(ln, "loop_num"));
    }
  }

  const auto opts = root["option"];
  if (!opts || !opts.IsSequence() || opts.size() == 0) {
    throw ConfigError("option", "expected a non-empty list of targets");
  }
  for (std::size_t i = 0; i < opts.size(); ++i) {
    const std::string key = "option[" + std::to_string(i) + "]";
    const auto& o = opts[i];
    if (!o.IsMap()) throw ConfigError(key, "expected a mapping");
    for (const auto& kv : o) {
      const auto k = kv.first.as<std::string>();
      if (!kOptionKeys.count(k)) cfg.warnings.push_back("unknown key '" + key + "." + k + "' ignored");
    }
    TargetSpec t;
    if (o["function_name"]) t.function_name = scalar_as<std::string>(o["function_name"], key + ".function_name");
    if (o["variable_name"]) t.variable_name = scalar_as<std::string>(o["variable_name"], key + ".variable_name");
    if (o["variable_init"]) t.variable_init = scalar_as<bool>(o["variable_init"], key + ".variable_init");
    if (o["variable_location"]) {
      const auto loc = scalar_as<long long>(o["variable_location"], key + ".variable_location");
      if (loc < 1) throw ConfigError(key + ".variable_location", "must be >= 1");
      t.variable_location = static_cast<std::uint32_t>(loc);
    }
    if (o["in_arr"]) t.in_arr = scalar_as<bool>(o["in_arr"], key + ".in_arr");
    if (o["in_loop"]) t.in_loop = scalar_as<bool>(o["in_loop"], key + ".in_loop");
    check_target_spec(t, i);
    if (t.in_loop && cfg.loop_num.empty()) throw ConfigError("loop_num", "required when in_loop is true");
    cfg.options.push_back(std::move(t));
  }

  if (const auto vn = root["variable_num"]) {
    const auto n = positive(vn, "variable_num");
    if (n != cfg.options.size()) {
      throw ConfigError("variable_num", "is " + std::to_string(n) + " but " +
                                            std::to_string(cfg.options.size()) + " option entries are given");
    }
  }
  cfg.variable_num = static_cast<std::uint32_t>(cfg.options.size());
  return cfg;
}

InputConfig load_input_yaml(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_input_yaml(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace lcfi::instrument
