#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcfi/ir/type.hpp"

namespace lcfi::ir {

enum class Opcode : std::uint8_t {
  Alloca,
  Load,
  Store,
  GetElementPtr,
  Add,
  Sub,
  Mul,
  SDiv,
  SRem,
  FAdd,
  FSub,
  FMul,
  FDiv,
  FNeg,
  ICmp,
  FCmp,
  Br,
  Phi,
  Call,
  Ret,
  ZExt,
  SExt,
  Trunc,
  FPToSI,
  SIToFP,
  FPExt,
  FPTrunc,
  BitCast,
  Select,
};

std::string_view opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);
bool is_terminator(Opcode op);
bool is_cast(Opcode op);
bool is_int_binary(Opcode op);
bool is_float_binary(Opcode op);

enum class ValueKind : std::uint8_t {
  Register,   // %name
  Global,     // @name
  Int,        // integer literal, also true/false
  Float,      // floating literal
  Null,       // null pointer
  ConstGep,   // getelementptr constant expression over a global
  Zero,       // zeroinitializer (global initializers only)
  String,     // c"..." (global initializers only)
  Aggregate,  // [ ... ] or { ... } (global initializers only)
};

// An operand or constant. `type` is the operand's declared type.
struct Value {
  ValueKind kind = ValueKind::Int;
  Type type;
  std::string name;              // register or global name, without sigil
  std::int64_t int_value = 0;
  double float_value = 0.0;
  std::string bytes;             // String payload
  std::vector<Value> elements;   // Aggregate elements; ConstGep indices
  Type gep_source;               // ConstGep source element type
  bool inbounds = false;         // ConstGep

  static Value reg(std::string name, Type type);
  static Value global(std::string name, Type type);
  static Value integer(std::int64_t v, Type type);
  static Value floating(double v, Type type);
  static Value null(Type type);

  bool operator==(const Value&) const = default;
};

struct CallSignature {
  std::vector<Type> params;
  bool varargs = false;
  bool operator==(const CallSignature&) const = default;
};

using InstructionIndex = std::uint32_t;

struct Instruction {
  std::optional<std::string> result;
  Opcode opcode = Opcode::Ret;
  Type type;                              // result type; void when no result
  std::vector<Value> operands;
  std::vector<std::string> labels;        // br targets, phi incoming blocks
  Type aux_type;                          // alloca/load/gep element type
  std::string predicate;                  // icmp/fcmp condition code
  std::vector<std::string> flags;         // nsw, nuw, exact, inbounds, fast-math
  std::optional<std::uint32_t> align;
  std::string callee;
  std::optional<CallSignature> signature;
  std::optional<InstructionIndex> index;
  int line = 0;                           // source line; not part of equality

  bool has_result() const { return result.has_value(); }
  bool operator==(const Instruction& o) const;
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> instructions;
  bool operator==(const BasicBlock&) const = default;
};

struct Param {
  std::string name;
  Type type;
  bool operator==(const Param&) const = default;
};

struct IrFunction {
  std::string name;
  std::vector<Param> params;
  Type return_type;
  std::vector<BasicBlock> blocks;
  bool operator==(const IrFunction&) const = default;

  const BasicBlock* find_block(std::string_view label) const;
  std::optional<std::size_t> block_position(std::string_view label) const;
};

struct Global {
  std::string name;
  Type type;                       // value type (the global itself is a pointer to it)
  std::optional<Value> initializer;
  bool is_constant = false;
  std::optional<std::uint32_t> align;
  bool operator==(const Global&) const = default;
};

struct Declaration {
  std::string name;
  Type return_type;
  std::vector<Type> params;
  bool varargs = false;
  bool operator==(const Declaration&) const = default;
};

struct IrModule {
  std::string source_name;
  TypeTable types;
  std::vector<Global> globals;
  std::vector<Declaration> declarations;
  std::vector<IrFunction> functions;
  bool operator==(const IrModule&) const = default;

  const IrFunction* find_function(std::string_view name) const;
  const Global* find_global(std::string_view name) const;
  std::size_t instruction_count() const;
  bool fully_indexed() const;
};

}  // namespace lcfi::ir
