#include "lcfi/ir/validate.hpp"

#include <map>
#include <set>

#include "lcfi/error.hpp"
#include "lcfi/ir/intrinsics.hpp"

namespace lcfi::ir {

std::string format_diagnostic(const Diagnostic& d, const std::string& file) {
  std::string out = file + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": ";
  if (d.severity == Severity::Warning) out += "warning: ";
  out += d.message;
  if (!d.function.empty()) {
    out += " (in @" + d.function;
    if (!d.block.empty()) out += ", block %" + d.block;
    out += ")";
  }
  return out;
}

namespace {

bool compatible(const Type& def, const Type& use) {
  if (def.is_pointer() && use.is_pointer()) return true;
  return def == use;
}

class Validator {
 public:
  explicit Validator(const IrModule& m) : m_(m) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> fn_names;
    for (const auto& f : m_.functions) {
      if (!fn_names.insert(f.name).second) module_diag("duplicate function @" + f.name);
    }
    for (const auto& g : m_.globals) check_layout(g.type, "global @" + g.name, nullptr, {}, -1);
    for (const auto& f : m_.functions) check_function(f);
    return std::move(diags_);
  }

 private:
  void module_diag(std::string msg) {
    Diagnostic d;
    d.message = std::move(msg);
    diags_.push_back(std::move(d));
  }

  void diag(const IrFunction& f, const std::string& block, int pos, int line, std::string msg) {
    Diagnostic d;
    d.message = std::move(msg);
    d.function = f.name;
    d.block = block;
    d.instruction = pos;
    d.line = line;
    diags_.push_back(std::move(d));
  }

  void check_layout(const Type& t, const std::string& what, const IrFunction* f,
                    const std::string& block, int pos, int line = 0) {
    try {
      if (size_of(t, m_.types) == 0 && t.kind != TypeKind::Array && t.kind != TypeKind::Struct) {
        throw Error("zero-sized type");
      }
    } catch (const Error& e) {
      if (f) {
        diag(*f, block, pos, line, what + ": " + e.what());
      } else {
        module_diag(what + ": " + e.what());
      }
    }
  }

  struct Def {
    Type type;
    int block = -1;  // -1 for parameters
    int pos = -1;
  };

  void check_function(const IrFunction& f) {
    if (f.blocks.empty()) {
      diag(f, "", -1, 0, "function has no basic blocks");
      return;
    }
    std::map<std::string, Def> defs;
    std::set<std::string> labels;
    for (const auto& p : f.params) {
      if (!defs.emplace(p.name, Def{p.type, -1, -1}).second) {
        diag(f, "", -1, 0, "duplicate register %" + p.name);
      }
    }
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
      const auto& blk = f.blocks[b];
      if (!labels.insert(blk.label).second) diag(f, blk.label, -1, 0, "duplicate block label %" + blk.label);
      for (std::size_t i = 0; i < blk.instructions.size(); ++i) {
        const auto& inst = blk.instructions[i];
        if (!inst.result) continue;
        if (!defs.emplace(*inst.result, Def{inst.type, static_cast<int>(b), static_cast<int>(i)}).second) {
          diag(f, blk.label, static_cast<int>(i), inst.line, "duplicate register %" + *inst.result);
        }
      }
    }

    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
      const auto& blk = f.blocks[b];
      if (blk.instructions.empty() || !is_terminator(blk.instructions.back().opcode)) {
        const int line = blk.instructions.empty() ? 0 : blk.instructions.back().line;
        diag(f, blk.label, -1, line, "missing terminator");
      }
      for (std::size_t i = 0; i < blk.instructions.size(); ++i) {
        const auto& inst = blk.instructions[i];
        const int pos = static_cast<int>(i);
        if (is_terminator(inst.opcode) && i + 1 != blk.instructions.size()) {
          diag(f, blk.label, pos, inst.line, "instruction after terminator");
        }
        for (const auto& op : inst.operands) {
          check_operand(f, blk.label, static_cast<int>(b), pos, inst, op, defs);
        }
        for (const auto& l : inst.labels) {
          if (!labels.count(l)) diag(f, blk.label, pos, inst.line, "unknown label %" + l);
        }
        check_instruction(f, blk.label, pos, inst);
      }
    }
  }

  void check_operand(const IrFunction& f, const std::string& label, int block, int pos,
                     const Instruction& inst, const Value& op, const std::map<std::string, Def>& defs) {
    switch (op.kind) {
      case ValueKind::Register: {
        auto it = defs.find(op.name);
        if (it == defs.end()) {
          diag(f, label, pos, inst.line, "undefined register %" + op.name);
          return;
        }
        const Def& d = it->second;
        if (inst.opcode != Opcode::Phi && d.block == block && d.pos >= pos) {
          diag(f, label, pos, inst.line, "use of %" + op.name + " before its definition");
        }
        if (!compatible(d.type, op.type)) {
          diag(f, label, pos, inst.line,
               "type mismatch for %" + op.name + ": defined as " + to_string(d.type) +
                   ", used as " + to_string(op.type));
        }
        return;
      }
      case ValueKind::Global:
      case ValueKind::ConstGep:
        if (!m_.find_global(op.name)) diag(f, label, pos, inst.line, "unknown global @" + op.name);
        return;
      default:
        return;
    }
  }

  void check_instruction(const IrFunction& f, const std::string& label, int pos, const Instruction& inst) {
    switch (inst.opcode) {
      case Opcode::Alloca:
        check_layout(inst.aux_type, "alloca type", &f, label, pos, inst.line);
        break;
      case Opcode::Load:
        if (!inst.aux_type.is_first_class_scalar()) {
          diag(f, label, pos, inst.line, "load of non-scalar type " + to_string(inst.aux_type));
        }
        break;
      case Opcode::Store:
        if (!inst.operands[0].type.is_first_class_scalar()) {
          diag(f, label, pos, inst.line, "store of non-scalar type");
        }
        break;
      case Opcode::GetElementPtr:
        check_layout(inst.aux_type, "getelementptr element type", &f, label, pos, inst.line);
        break;
      case Opcode::Call: {
        if (const IrFunction* callee = m_.find_function(inst.callee)) {
          if (callee->params.size() != inst.operands.size()) {
            diag(f, label, pos, inst.line,
                 "call to @" + inst.callee + " with " + std::to_string(inst.operands.size()) +
                     " arguments, expected " + std::to_string(callee->params.size()));
          }
          if (!compatible(callee->return_type, inst.type)) {
            diag(f, label, pos, inst.line, "return type mismatch in call to @" + inst.callee);
          }
        } else if (!is_intrinsic(inst.callee)) {
          diag(f, label, pos, inst.line, "unknown callee @" + inst.callee);
        }
        break;
      }
      case Opcode::Ret: {
        const bool void_ret = inst.operands.empty();
        if (void_ret != f.return_type.is_void() ||
            (!void_ret && !compatible(f.return_type, inst.operands[0].type))) {
          diag(f, label, pos, inst.line, "ret type does not match function return type");
        }
        break;
      }
      case Opcode::Phi:
        if (inst.operands.empty()) diag(f, label, pos, inst.line, "phi without incoming values");
        break;
      default:
        break;
    }
  }

  const IrModule& m_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const IrModule& module) { return Validator(module).run(); }

}  // namespace lcfi::ir
