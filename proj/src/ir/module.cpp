#include "lcfi/ir/module.hpp"

#include <array>

namespace lcfi::ir {

namespace {

struct OpcodeName {
  Opcode op;
  std::string_view name;
};

constexpr std::array kOpcodeNames = {
    OpcodeName{Opcode::Alloca, "alloca"},   OpcodeName{Opcode::Load, "load"},
    OpcodeName{Opcode::Store, "store"},     OpcodeName{Opcode::GetElementPtr, "getelementptr"},
    OpcodeName{Opcode::Add, "add"},         OpcodeName{Opcode::Sub, "sub"},
    OpcodeName{Opcode::Mul, "mul"},         OpcodeName{Opcode::SDiv, "sdiv"},
    OpcodeName{Opcode::SRem, "srem"},       OpcodeName{Opcode::FAdd, "fadd"},
    OpcodeName{Opcode::FSub, "fsub"},       OpcodeName{Opcode::FMul, "fmul"},
    OpcodeName{Opcode::FDiv, "fdiv"},       OpcodeName{Opcode::FNeg, "fneg"},
    OpcodeName{Opcode::ICmp, "icmp"},       OpcodeName{Opcode::FCmp, "fcmp"},
    OpcodeName{Opcode::Br, "br"},           OpcodeName{Opcode::Phi, "phi"},
    OpcodeName{Opcode::Call, "call"},       OpcodeName{Opcode::Ret, "ret"},
    OpcodeName{Opcode::ZExt, "zext"},       OpcodeName{Opcode::SExt, "sext"},
    OpcodeName{Opcode::Trunc, "trunc"},     OpcodeName{Opcode::FPToSI, "fptosi"},
    OpcodeName{Opcode::SIToFP, "sitofp"},   OpcodeName{Opcode::FPExt, "fpext"},
    OpcodeName{Opcode::FPTrunc, "fptrunc"}, OpcodeName{Opcode::BitCast, "bitcast"},
    OpcodeName{Opcode::Select, "select"},
};

}  // namespace

std::string_view opcode_name(Opcode op) {
  for (const auto& e : kOpcodeNames)
    if (e.op == op) return e.name;
  return "?";
}

std::optional<Opcode> opcode_from_name(std::string_view name) {
  for (const auto& e : kOpcodeNames)
    if (e.name == name) return e.op;
  return std::nullopt;
}

bool is_terminator(Opcode op) { return op == Opcode::Br || op == Opcode::Ret; }

bool is_cast(Opcode op) {
  switch (op) {
    case Opcode::ZExt:
    case Opcode::SExt:
    case Opcode::Trunc:
    case Opcode::FPToSI:
    case Opcode::SIToFP:
    case Opcode::FPExt:
    case Opcode::FPTrunc:
    case Opcode::BitCast:
      return true;
    default:
      return false;
  }
}

bool is_int_binary(Opcode op) {
  return op == Opcode::Add || op == Opcode::Sub || op == Opcode::Mul || op == Opcode::SDiv ||
         op == Opcode::SRem;
}

bool is_float_binary(Opcode op) {
  return op == Opcode::FAdd || op == Opcode::FSub || op == Opcode::FMul || op == Opcode::FDiv;
}

Value Value::reg(std::string name, Type type) {
  Value v;
  v.kind = ValueKind::Register;
  v.name = std::move(name);
  v.type = std::move(type);
  return v;
}

Value Value::global(std::string name, Type type) {
  Value v;
  v.kind = ValueKind::Global;
  v.name = std::move(name);
  v.type = std::move(type);
  return v;
}

Value Value::integer(std::int64_t x, Type type) {
  Value v;
  v.kind = ValueKind::Int;
  v.int_value = x;
  v.type = std::move(type);
  return v;
}

Value Value::floating(double x, Type type) {
  Value v;
  v.kind = ValueKind::Float;
  v.float_value = x;
  v.type = std::move(type);
  return v;
}

Value Value::null(Type type) {
  Value v;
  v.kind = ValueKind::Null;
  v.type = std::move(type);
  return v;
}

bool Instruction::operator==(const Instruction& o) const {
  return result == o.result && opcode == o.opcode && type == o.type && operands == o.operands &&
         labels == o.labels && aux_type == o.aux_type && predicate == o.predicate &&
         flags == o.flags && align == o.align && callee == o.callee &&
         signature == o.signature && index == o.index;
}

const BasicBlock* IrFunction::find_block(std::string_view label) const {
  for (const auto& b : blocks)
    if (b.label == label) return &b;
  return nullptr;
}

std::optional<std::size_t> IrFunction::block_position(std::string_view label) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].label == label) return i;
  return std::nullopt;
}

const IrFunction* IrModule::find_function(std::string_view name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const Global* IrModule::find_global(std::string_view name) const {
  for (const auto& g : globals)
    if (g.name == name) return &g;
  return nullptr;
}

std::size_t IrModule::instruction_count() const {
  std::size_t n = 0;
  for (const auto& f : functions)
    for (const auto& b : f.blocks) n += b.instructions.size();
  return n;
}

bool IrModule::fully_indexed() const {
  for (const auto& f : functions)
    for (const auto& b : f.blocks)
      for (const auto& i : b.instructions)
        if (!i.index) return false;
  return true;
}

}  // namespace lcfi::ir
