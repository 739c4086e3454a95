#include <algorithm>
#include <map>
#include <optional>

#include "lcfi/instrument/target_spec.hpp"
#include "lcfi/ir/def_use.hpp"

namespace lcfi::instrument {

namespace {

struct Root {
  enum class Kind { Alloca, Param, Global } kind;
  std::string name;
};

class RootFinder {
 public:
  explicit RootFinder(const ir::IrFunction& f) : f_(f) {
    for (const auto& b : f.blocks)
      for (const auto& i : b.instructions)
        if (i.result) defs_[*i.result] = &i;
    // clang -O0 spills each parameter into an alloca right after entry.
    for (const auto& b : f.blocks)
      for (const auto& i : b.instructions) {
        if (i.opcode != ir::Opcode::Store || i.operands.size() != 2) continue;
        const auto& v = i.operands[0];
        const auto& p = i.operands[1];
        if (v.kind == ir::ValueKind::Register && p.kind == ir::ValueKind::Register && is_param(v.name) &&
            !spilled_.count(p.name))
          spilled_[p.name] = v.name;
      }
  }

  std::optional<Root> root(const ir::Value& v, int depth = 0) const {
    if (depth > 64) return std::nullopt;
    if (v.kind == ir::ValueKind::Global) return Root{Root::Kind::Global, v.name};
    if (v.kind == ir::ValueKind::ConstGep) return Root{Root::Kind::Global, v.name};
    if (v.kind != ir::ValueKind::Register) return std::nullopt;
    if (is_param(v.name)) return Root{Root::Kind::Param, v.name};
    auto it = defs_.find(v.name);
    if (it == defs_.end()) return std::nullopt;
    const auto& inst = *it->second;
    switch (inst.opcode) {
      case ir::Opcode::Alloca:
        return Root{Root::Kind::Alloca, v.name};
      case ir::Opcode::GetElementPtr:
      case ir::Opcode::BitCast:
        return root(inst.operands.at(0), depth + 1);
      case ir::Opcode::Load:
        if (inst.type.is_pointer()) return root(inst.operands.at(0), depth + 1);
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  bool matches(const Root& r, const std::string& variable) const {
    switch (r.kind) {
      case Root::Kind::Param:
      case Root::Kind::Global:
        return r.name == variable;
      case Root::Kind::Alloca: {
        if (r.name == variable || r.name == variable + ".addr") return true;
        auto it = spilled_.find(r.name);
        return it != spilled_.end() && it->second == variable;
      }
    }
    return false;
  }

  bool declares(const std::string& variable) const {
    if (is_param(variable)) return true;
    if (spilled_.count(variable)) return true;
    for (const auto& [reg, param] : spilled_)
      if (param == variable) return true;
    for (const auto& [name, inst] : defs_)
      if (inst->opcode == ir::Opcode::Alloca && (name == variable || name == variable + ".addr")) return true;
    return false;
  }

 private:
  bool is_param(const std::string& name) const {
    return std::any_of(f_.params.begin(), f_.params.end(), [&](const ir::Param& p) { return p.name == name; });
  }

  const ir::IrFunction& f_;
  std::map<std::string, const ir::Instruction*> defs_;
  std::map<std::string, std::string> spilled_;  // alloca register -> parameter
};

std::optional<fault::NumericKind> numeric_kind(const ir::Type& t) {
  switch (t.kind) {
    case ir::TypeKind::I32: return fault::NumericKind::I32;
    case ir::TypeKind::I64: return fault::NumericKind::I64;
    case ir::TypeKind::F32: return fault::NumericKind::F32;
    case ir::TypeKind::F64: return fault::NumericKind::F64;
    default: return std::nullopt;
  }
}

}  // namespace

std::vector<Target> resolve_target(const ir::IrModule& module, const TargetSpec& spec) {
  check_target_spec(spec, 0);
  const auto* f = module.find_function(spec.function_name);
  if (!f) {
    throw ResolveError(ResolveError::Kind::FunctionNotFound, "function @" + spec.function_name + " not found");
  }
  RootFinder finder(*f);

  std::vector<const ir::Instruction*> loads;
  bool saw_pointer_load = false;
  for (const auto& b : f->blocks)
    for (const auto& i : b.instructions) {
      if (i.opcode != ir::Opcode::Load) continue;
      auto r = finder.root(i.operands.at(0));
      if (!r || !finder.matches(*r, spec.variable_name)) continue;
      if (i.type.is_pointer()) {
        saw_pointer_load = true;
        continue;
      }
      loads.push_back(&i);
    }

  if (loads.empty()) {
    if (saw_pointer_load) {
      throw ResolveError(ResolveError::Kind::NonNumericTarget,
                         "'" + spec.variable_name + "' in @" + spec.function_name + " is only read as a pointer");
    }
    if (!finder.declares(spec.variable_name) && !module.find_global(spec.variable_name)) {
      throw ResolveError(ResolveError::Kind::VariableNotFound,
                         "variable '" + spec.variable_name + "' not found in @" + spec.function_name);
    }
    throw ResolveError(ResolveError::Kind::VariableNotFound,
                       "variable '" + spec.variable_name + "' is never loaded in @" + spec.function_name);
  }
  if (spec.variable_location > loads.size()) {
    throw ResolveError(ResolveError::Kind::VariableNotFound,
                       "variable_location " + std::to_string(spec.variable_location) + " exceeds the " +
                           std::to_string(loads.size()) + " loads of '" + spec.variable_name + "' in @" +
                           spec.function_name);
  }

  std::vector<Target> out;
  const std::size_t first = spec.variable_location - 1;
  const std::size_t last = spec.in_arr ? loads.size() : first + 1;
  for (std::size_t k = first; k < last; ++k) {
    const auto* inst = loads[k];
    auto kind = numeric_kind(inst->type);
    if (!kind) {
      throw ResolveError(ResolveError::Kind::NonNumericTarget,
                         "load of '" + spec.variable_name + "' has non-numeric type " + ir::to_string(inst->type));
    }
    if (!inst->index) throw ir::IndicesMissing();
    out.push_back({*inst->index, *kind, f->name});
  }
  return out;
}

InjectionPlan resolve_targets(const ir::IrModule& module, const InputConfig& input) {
  InjectionPlan plan;
  plan.scope = input.scope();
  plan.fault = input.fault;
  for (std::size_t i = 0; i < input.options.size(); ++i) {
    check_target_spec(input.options[i], i);
    for (auto& t : resolve_target(module, input.options[i])) plan.targets.push_back(std::move(t));
  }
  std::sort(plan.targets.begin(), plan.targets.end(),
            [](const Target& a, const Target& b) { return a.index < b.index; });
  plan.targets.erase(std::unique(plan.targets.begin(), plan.targets.end(),
                                 [](const Target& a, const Target& b) { return a.index == b.index; }),
                     plan.targets.end());
  return plan;
}

}  // namespace lcfi::instrument
