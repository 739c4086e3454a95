#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "format.hpp"
#include "lcfi/vm/machine.hpp"
#include "memory.hpp"

namespace lcfi::vm::detail {

// Thrown inside the interpreter and converted into a trapped outcome.
struct Trap {
  TrapKind kind;
  std::string message;
};

enum class Intrinsic : std::uint8_t {
  None,
  Printf,
  Scanf,
  Fprintf,
  Fscanf,
  Freopen,
  Fopen,
  Fclose,
  Sqrt,
  Fabs,
  Pow,
  Exp,
  Log,
  Malloc,
  Calloc,
  Free,
  Memset,
  Memcpy,
};

enum class Pred : std::uint8_t {
  Eq, Ne, Ugt, Uge, Ult, Ule, Sgt, Sge, Slt, Sle,
  FFalse, Oeq, Ogt, Oge, Olt, Ole, One, Ord, Uno, Ueq, FUgt, FUge, FUlt, FUle, Une, FTrue,
};

struct Operand {
  bool is_slot = false;
  std::uint32_t slot = 0;
  std::uint64_t imm = 0;
  ir::TypeKind kind = ir::TypeKind::I32;
};

struct GepStep {
  Operand index;
  std::uint64_t scale = 0;
  bool is_field = false;
  std::uint64_t field_offset = 0;
};

struct PhiIn {
  std::uint32_t block = 0;
  Operand value;
};

struct LInst {
  const ir::Instruction* src = nullptr;
  ir::Opcode op = ir::Opcode::Ret;
  ir::TypeKind type = ir::TypeKind::Void;      // result kind; stored value kind for store
  ir::TypeKind src_kind = ir::TypeKind::Void;  // operand kind for casts and compares
  std::int64_t dst = -1;
  std::vector<Operand> ops;
  std::vector<std::uint32_t> targets;
  std::vector<PhiIn> phis;
  std::vector<GepStep> steps;
  std::uint64_t size = 0;   // alloca / access size
  std::uint64_t align = 0;  // alloca
  Pred pred = Pred::Eq;
  std::int32_t callee = -1;
  Intrinsic intrinsic = Intrinsic::None;
  ir::InstructionIndex index = 0;
  bool trace = false;
  bool inject = false;
  fault::NumericKind inject_kind = fault::NumericKind::F64;
  std::int32_t loop = -1;  // innermost loop within the function
};

struct LFunction {
  std::string name;
  std::uint32_t slots = 0;
  std::vector<std::uint32_t> param_slots;
  std::vector<ir::TypeKind> param_kinds;
  ir::TypeKind ret = ir::TypeKind::Void;
  std::vector<std::vector<LInst>> blocks;
  std::vector<std::vector<bool>> loop_members;              // per loop: block membership
  std::vector<std::vector<std::uint32_t>> loops_by_header;  // per block: loops it heads
};

struct Frame {
  std::uint32_t fn = 0;
  std::uint32_t block = 0;
  std::uint32_t pc = 0;
  std::uint32_t prev_block = 0;
  std::uint64_t invocation = 0;
  std::vector<std::uint64_t> regs;
  std::vector<std::uint64_t> allocas;
  std::vector<std::uint64_t> trips;
  std::vector<std::uint64_t> phi_values;
};

struct Stream {
  enum class Sink { None, Stdout, Stderr, File } sink = Sink::None;
  bool open = true;
  bool readable = false;
  std::string input;
  std::size_t pos = 0;
  std::string file;  // output file name; for stdout, the freopen target
};

class Machine {
 public:
  Machine(const instrument::InstrumentedModule& module, const IoConfig& io, const instrument::InjectionPlan* plan,
          fault::Sampler* sampler, const ExecOptions& options);
  RunOutcome run();

 private:
  // lowering
  void load_io(const IoConfig& io);
  void layout_globals();
  void write_constant(std::uint64_t addr, const ir::Value& v, const ir::Type& type);
  std::uint64_t constant_gep(const ir::Value& v);
  void lower();
  Operand operand(const ir::Value& v, const std::unordered_map<std::string, std::uint32_t>& slots);

  // execution
  void push_frame(std::uint32_t fn, const std::vector<std::uint64_t>& args);
  void enter_block(Frame& fr, std::uint32_t target);
  std::uint64_t get(const Frame& fr, const Operand& o) const { return o.is_slot ? fr.regs[o.slot] : o.imm; }
  void finish(const LInst& in, Frame& fr, std::uint64_t value);
  std::uint64_t maybe_inject(const LInst& in, const Frame& fr, std::uint64_t value);
  void record_trace(const LInst& in, std::uint64_t value);
  std::uint64_t load(std::uint64_t addr, ir::TypeKind kind, std::uint64_t size);
  void store(std::uint64_t addr, ir::TypeKind kind, std::uint64_t size, std::uint64_t value);
  std::uint64_t binary(const LInst& in, std::uint64_t a, std::uint64_t b);
  std::uint64_t compare(const LInst& in, std::uint64_t a, std::uint64_t b) const;
  std::uint64_t cast(const LInst& in, std::uint64_t v) const;

  // intrinsics (intrinsics.cpp)
  std::uint64_t call_intrinsic(const LInst& in, const std::vector<FormatArg>& args);
  std::string read_string(std::uint64_t addr);
  Stream& stream_at(std::uint64_t handle, const char* who);
  std::uint64_t new_stream(Stream s);
  bool write_stream(Stream& s, const std::string& text);
  std::uint64_t do_scan(Stream& s, const std::string& fmt, const std::vector<FormatArg>& args, std::size_t first);
  const std::string* input_file(const std::string& name) const;

  const instrument::InstrumentedModule& module_;
  const instrument::InjectionPlan* plan_;
  fault::Sampler* sampler_;
  ExecOptions options_;
  bool tracing_ = false;

  Arena arena_;
  std::map<std::string, std::uint64_t> global_addr_;
  std::map<std::string, std::uint32_t> function_ids_;
  std::vector<LFunction> functions_;
  std::vector<std::uint64_t> exec_counts_;
  std::vector<std::uint64_t> invocations_;
  std::vector<Frame> frames_;

  std::map<std::string, std::string> inputs_;
  std::map<std::uint64_t, Stream> streams_;
  std::uint64_t stdin_ = 0, stdout_ = 0, stderr_ = 0;

  RunOutcome out_;
  const LInst* current_ = nullptr;
};

std::uint64_t mask_for(ir::TypeKind kind);
std::uint64_t width_bytes(ir::TypeKind kind);

}  // namespace lcfi::vm::detail
