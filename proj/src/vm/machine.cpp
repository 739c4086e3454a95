#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "lcfi/ir/loops.hpp"
#include "machine_impl.hpp"

namespace lcfi::vm {

std::string_view trap_kind_name(TrapKind kind) {
  switch (kind) {
    case TrapKind::OutOfBounds: return "out_of_bounds";
    case TrapKind::DivisionByZero: return "division_by_zero";
    case TrapKind::InvalidBranch: return "invalid_branch";
    case TrapKind::StackOverflow: return "stack_overflow";
    case TrapKind::BadIntrinsicArg: return "bad_intrinsic_arg";
    case TrapKind::NonFiniteFaultTarget: return "non_finite_fault_target";
  }
  return "?";
}

std::optional<TrapKind> trap_kind_from_name(std::string_view name) {
  for (auto k : {TrapKind::OutOfBounds, TrapKind::DivisionByZero, TrapKind::InvalidBranch, TrapKind::StackOverflow,
                 TrapKind::BadIntrinsicArg, TrapKind::NonFiniteFaultTarget})
    if (trap_kind_name(k) == name) return k;
  return std::nullopt;
}

std::string_view run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Trapped: return "trapped";
    case RunStatus::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

namespace detail {

using ir::Opcode;
using ir::TypeKind;

std::uint64_t mask_for(TypeKind kind) {
  switch (kind) {
    case TypeKind::I1: return 1;
    case TypeKind::I8: return 0xff;
    case TypeKind::I32:
    case TypeKind::F32: return 0xffffffffULL;
    default: return ~0ULL;
  }
}

std::uint64_t width_bytes(TypeKind kind) {
  switch (kind) {
    case TypeKind::I1:
    case TypeKind::I8: return 1;
    case TypeKind::I32:
    case TypeKind::F32: return 4;
    default: return 8;
  }
}

namespace {

std::int64_t sext(std::uint64_t v, TypeKind kind) {
  switch (kind) {
    case TypeKind::I1: return (v & 1) ? -1 : 0;
    case TypeKind::I8: return static_cast<std::int8_t>(v);
    case TypeKind::I32: return static_cast<std::int32_t>(v);
    default: return static_cast<std::int64_t>(v);
  }
}

double as_double(std::uint64_t bits, TypeKind kind) {
  if (kind == TypeKind::F32) return std::bit_cast<float>(static_cast<std::uint32_t>(bits));
  return std::bit_cast<double>(bits);
}

std::uint64_t from_double(double d, TypeKind kind) {
  if (kind == TypeKind::F32) return std::bit_cast<std::uint32_t>(static_cast<float>(d));
  return std::bit_cast<std::uint64_t>(d);
}

std::uint64_t float_bits(float f) { return std::bit_cast<std::uint32_t>(f); }

unsigned int_bits(TypeKind kind) {
  switch (kind) {
    case TypeKind::I1: return 1;
    case TypeKind::I8: return 8;
    case TypeKind::I32: return 32;
    default: return 64;
  }
}

Pred pred_from(const std::string& p, bool is_float) {
  static const std::map<std::string, Pred> ipreds = {
      {"eq", Pred::Eq},   {"ne", Pred::Ne},   {"ugt", Pred::Ugt}, {"uge", Pred::Uge}, {"ult", Pred::Ult},
      {"ule", Pred::Ule}, {"sgt", Pred::Sgt}, {"sge", Pred::Sge}, {"slt", Pred::Slt}, {"sle", Pred::Sle},
  };
  static const std::map<std::string, Pred> fpreds = {
      {"false", Pred::FFalse}, {"oeq", Pred::Oeq}, {"ogt", Pred::Ogt},  {"oge", Pred::Oge},
      {"olt", Pred::Olt},      {"ole", Pred::Ole}, {"one", Pred::One},  {"ord", Pred::Ord},
      {"uno", Pred::Uno},      {"ueq", Pred::Ueq}, {"ugt", Pred::FUgt}, {"uge", Pred::FUge},
      {"ult", Pred::FUlt},     {"ule", Pred::FUle}, {"une", Pred::Une}, {"true", Pred::FTrue},
  };
  const auto& table = is_float ? fpreds : ipreds;
  auto it = table.find(p);
  if (it == table.end()) throw Error("unknown comparison predicate '" + p + "'");
  return it->second;
}

Intrinsic intrinsic_from(const std::string& name) {
  static const std::map<std::string, Intrinsic, std::less<>> table = {
      {"printf", Intrinsic::Printf},
      {"scanf", Intrinsic::Scanf},
      {"__isoc99_scanf", Intrinsic::Scanf},
      {"fprintf", Intrinsic::Fprintf},
      {"fscanf", Intrinsic::Fscanf},
      {"__isoc99_fscanf", Intrinsic::Fscanf},
      {"freopen", Intrinsic::Freopen},
      {"fopen", Intrinsic::Fopen},
      {"fclose", Intrinsic::Fclose},
      {"sqrt", Intrinsic::Sqrt},
      {"llvm.sqrt.f64", Intrinsic::Sqrt},
      {"fabs", Intrinsic::Fabs},
      {"llvm.fabs.f64", Intrinsic::Fabs},
      {"pow", Intrinsic::Pow},
      {"llvm.pow.f64", Intrinsic::Pow},
      {"exp", Intrinsic::Exp},
      {"llvm.exp.f64", Intrinsic::Exp},
      {"log", Intrinsic::Log},
      {"llvm.log.f64", Intrinsic::Log},
      {"malloc", Intrinsic::Malloc},
      {"calloc", Intrinsic::Calloc},
      {"free", Intrinsic::Free},
      {"memset", Intrinsic::Memset},
      {"llvm.memset.p0i8.i64", Intrinsic::Memset},
      {"llvm.memset.p0.i64", Intrinsic::Memset},
      {"memcpy", Intrinsic::Memcpy},
      {"llvm.memcpy.p0i8.p0i8.i64", Intrinsic::Memcpy},
      {"llvm.memcpy.p0.p0.i64", Intrinsic::Memcpy},
  };
  auto it = table.find(name);
  return it == table.end() ? Intrinsic::None : it->second;
}

std::string read_host_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex_of(std::uint64_t v) {
  std::ostringstream s;
  s << "0x" << std::hex << v;
  return s.str();
}

}  // namespace

Machine::Machine(const instrument::InstrumentedModule& module, const IoConfig& io,
                 const instrument::InjectionPlan* plan, fault::Sampler* sampler, const ExecOptions& options)
    : module_(module), plan_(plan), sampler_(sampler), options_(options) {
  tracing_ = options_.trace && !module_.trace_points.empty();
  if (tracing_) out_.trace.emplace();
  load_io(io);
  layout_globals();
  lower();
}

void Machine::load_io(const IoConfig& io) {
  for (const auto& [name, path] : io.files) inputs_[name] = read_host_file(path);
  for (const auto& [name, bytes] : io.contents) inputs_[name] = bytes;

  Stream in;
  in.readable = true;
  if (io.stdin_text)
    in.input = *io.stdin_text;
  else if (io.stdin_path)
    in.input = read_host_file(*io.stdin_path);
  stdin_ = new_stream(std::move(in));
  Stream o;
  o.sink = Stream::Sink::Stdout;
  stdout_ = new_stream(std::move(o));
  Stream e;
  e.sink = Stream::Sink::Stderr;
  stderr_ = new_stream(std::move(e));
}

void Machine::layout_globals() {
  const auto& m = module_.module;
  for (const auto& g : m.globals) {
    std::uint64_t size = 8, align = 8;
    try {
      size = ir::size_of(g.type, m.types);
      align = ir::align_of(g.type, m.types);
    } catch (const Error&) {
      if (g.initializer) throw;
    }
    if (g.align) align = std::max<std::uint64_t>(align, *g.align);
    global_addr_[g.name] = arena_.allocate(size, align, Region::Global);
  }
  for (const auto& g : m.globals) {
    const auto addr = global_addr_.at(g.name);
    if (g.initializer) {
      write_constant(addr, *g.initializer, g.type);
      continue;
    }
    std::uint64_t handle = 0;
    if (g.name == "stdin") handle = stdin_;
    if (g.name == "stdout") handle = stdout_;
    if (g.name == "stderr") handle = stderr_;
    if (handle && g.type.is_pointer()) std::memcpy(arena_.access(addr, 8), &handle, 8);
  }
}

std::uint64_t Machine::constant_gep(const ir::Value& v) {
  auto it = global_addr_.find(v.name);
  if (it == global_addr_.end()) throw Error("constant getelementptr over unknown global @" + v.name);
  const auto& types = module_.module.types;
  std::uint64_t addr = it->second;
  ir::Type cur = v.gep_source;
  for (std::size_t i = 0; i < v.elements.size(); ++i) {
    const std::int64_t idx = v.elements[i].int_value;
    if (i == 0) {
      addr += static_cast<std::uint64_t>(idx) * ir::size_of(cur, types);
    } else if (cur.kind == TypeKind::Array) {
      cur = cur.element();
      addr += static_cast<std::uint64_t>(idx) * ir::size_of(cur, types);
    } else if (cur.kind == TypeKind::Struct) {
      addr += ir::field_offset(cur, static_cast<std::size_t>(idx), types);
      cur = ir::struct_fields(cur, types).at(static_cast<std::size_t>(idx));
    } else {
      throw Error("constant getelementptr indexes into a scalar");
    }
  }
  return addr;
}

void Machine::write_constant(std::uint64_t addr, const ir::Value& v, const ir::Type& type) {
  const auto& types = module_.module.types;
  auto put = [&](std::uint64_t bits, std::uint64_t n) {
    std::uint8_t* p = arena_.access(addr, n);
    if (!p) throw Error("global initializer does not fit its type");
    std::memcpy(p, &bits, n);
  };
  switch (v.kind) {
    case ir::ValueKind::Int:
      put(static_cast<std::uint64_t>(v.int_value) & mask_for(type.kind), width_bytes(type.kind));
      break;
    case ir::ValueKind::Float:
      put(type.kind == TypeKind::F32 ? float_bits(static_cast<float>(v.float_value))
                                     : std::bit_cast<std::uint64_t>(v.float_value),
          width_bytes(type.kind));
      break;
    case ir::ValueKind::Null:
    case ir::ValueKind::Zero:
      break;
    case ir::ValueKind::Global: {
      auto it = global_addr_.find(v.name);
      if (it == global_addr_.end()) throw Error("initializer refers to unknown global @" + v.name);
      put(it->second, 8);
      break;
    }
    case ir::ValueKind::ConstGep:
      put(constant_gep(v), 8);
      break;
    case ir::ValueKind::String: {
      std::uint8_t* p = arena_.access(addr, v.bytes.size());
      if (!p) throw Error("string initializer does not fit its type");
      std::memcpy(p, v.bytes.data(), v.bytes.size());
      break;
    }
    case ir::ValueKind::Aggregate:
      if (type.kind == TypeKind::Array) {
        const auto elem = type.element();
        const auto step = ir::size_of(elem, types);
        for (std::size_t i = 0; i < v.elements.size(); ++i) write_constant(addr + i * step, v.elements[i], elem);
      } else {
        const auto& fields = ir::struct_fields(type, types);
        for (std::size_t i = 0; i < v.elements.size() && i < fields.size(); ++i)
          write_constant(addr + ir::field_offset(type, i, types), v.elements[i], fields[i]);
      }
      break;
    case ir::ValueKind::Register:
      throw Error("register in global initializer");
  }
}

Operand Machine::operand(const ir::Value& v, const std::unordered_map<std::string, std::uint32_t>& slots) {
  Operand o;
  o.kind = v.type.kind;
  switch (v.kind) {
    case ir::ValueKind::Register: {
      auto it = slots.find(v.name);
      if (it == slots.end()) throw Error("undefined register %" + v.name);
      o.is_slot = true;
      o.slot = it->second;
      break;
    }
    case ir::ValueKind::Int:
      o.imm = static_cast<std::uint64_t>(v.int_value) & mask_for(v.type.kind);
      break;
    case ir::ValueKind::Float:
      o.imm = v.type.kind == TypeKind::F32 ? float_bits(static_cast<float>(v.float_value))
                                           : std::bit_cast<std::uint64_t>(v.float_value);
      break;
    case ir::ValueKind::Null:
    case ir::ValueKind::Zero:
      o.imm = 0;
      break;
    case ir::ValueKind::Global: {
      auto it = global_addr_.find(v.name);
      if (it == global_addr_.end()) throw Error("unknown global @" + v.name);
      o.imm = it->second;
      break;
    }
    case ir::ValueKind::ConstGep:
      o.imm = constant_gep(v);
      break;
    default:
      throw Error("unsupported operand kind");
  }
  return o;
}

void Machine::lower() {
  const auto& m = module_.module;
  const auto& types = m.types;
  for (std::size_t i = 0; i < m.functions.size(); ++i)
    function_ids_[m.functions[i].name] = static_cast<std::uint32_t>(i);

  ir::InstructionIndex max_index = 0;
  for (const auto& f : m.functions)
    for (const auto& b : f.blocks)
      for (const auto& inst : b.instructions)
        if (inst.index) max_index = std::max(max_index, *inst.index);
  exec_counts_.assign(static_cast<std::size_t>(max_index) + 1, 0);
  invocations_.assign(m.functions.size(), 0);

  for (const auto& f : m.functions) {
    LFunction lf;
    lf.name = f.name;
    lf.ret = f.return_type.kind;
    std::unordered_map<std::string, std::uint32_t> slots;
    for (const auto& p : f.params) {
      lf.param_slots.push_back(lf.slots);
      lf.param_kinds.push_back(p.type.kind);
      slots[p.name] = lf.slots++;
    }
    for (const auto& b : f.blocks)
      for (const auto& inst : b.instructions)
        if (inst.result) slots[*inst.result] = lf.slots++;

    std::unordered_map<std::string, std::uint32_t> block_ids;
    for (std::size_t b = 0; b < f.blocks.size(); ++b) block_ids[f.blocks[b].label] = static_cast<std::uint32_t>(b);
    auto block_id = [&](const std::string& label) {
      auto it = block_ids.find(label);
      if (it == block_ids.end()) throw Error("unknown label %" + label + " in @" + f.name);
      return it->second;
    };

    const auto loops = ir::find_loops(f);
    lf.loops_by_header.assign(f.blocks.size(), {});
    std::vector<std::int32_t> innermost(f.blocks.size(), -1);
    for (std::size_t l = 0; l < loops.size(); ++l) {
      std::vector<bool> member(f.blocks.size(), false);
      for (auto b : loops[l].blocks) member[b] = true;
      lf.loop_members.push_back(std::move(member));
      lf.loops_by_header[loops[l].header].push_back(static_cast<std::uint32_t>(l));
      for (auto b : loops[l].blocks) {
        auto& cur = innermost[b];
        if (cur < 0 || loops[static_cast<std::size_t>(cur)].blocks.size() > loops[l].blocks.size())
          cur = static_cast<std::int32_t>(l);
      }
    }

    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
      std::vector<LInst> insts;
      for (const auto& inst : f.blocks[b].instructions) {
        LInst li;
        li.src = &inst;
        li.op = inst.opcode;
        li.type = inst.type.kind;
        li.index = inst.index.value_or(0);
        li.loop = innermost[b];
        if (inst.result) li.dst = slots.at(*inst.result);
        if (li.index && tracing_ && module_.traced(li.index)) li.trace = true;
        switch (inst.opcode) {
          case Opcode::Alloca:
            li.size = ir::size_of(inst.aux_type, types);
            li.align = std::max<std::uint64_t>(ir::align_of(inst.aux_type, types), inst.align.value_or(1));
            break;
          case Opcode::Load:
            li.size = ir::size_of(inst.aux_type, types);
            li.ops.push_back(operand(inst.operands.at(0), slots));
            break;
          case Opcode::Store:
            li.type = inst.operands.at(0).type.kind;
            li.size = ir::size_of(inst.operands.at(0).type, types);
            li.ops.push_back(operand(inst.operands.at(0), slots));
            li.ops.push_back(operand(inst.operands.at(1), slots));
            break;
          case Opcode::GetElementPtr: {
            li.ops.push_back(operand(inst.operands.at(0), slots));
            ir::Type cur = inst.aux_type;
            for (std::size_t i = 1; i < inst.operands.size(); ++i) {
              GepStep st;
              const auto& iv = inst.operands[i];
              if (i == 1) {
                st.index = operand(iv, slots);
                st.scale = ir::size_of(cur, types);
              } else if (cur.kind == TypeKind::Array) {
                cur = cur.element();
                st.index = operand(iv, slots);
                st.scale = ir::size_of(cur, types);
              } else if (cur.kind == TypeKind::Struct) {
                if (iv.kind != ir::ValueKind::Int) throw Error("struct index must be a constant");
                st.is_field = true;
                st.field_offset = ir::field_offset(cur, static_cast<std::size_t>(iv.int_value), types);
                cur = ir::struct_fields(cur, types).at(static_cast<std::size_t>(iv.int_value));
              } else {
                throw Error("getelementptr indexes into a scalar in @" + f.name);
              }
              li.steps.push_back(st);
            }
            break;
          }
          case Opcode::ICmp:
          case Opcode::FCmp:
            li.src_kind = inst.operands.at(0).type.kind;
            li.pred = pred_from(inst.predicate, inst.opcode == Opcode::FCmp);
            for (const auto& v : inst.operands) li.ops.push_back(operand(v, slots));
            break;
          case Opcode::Br:
            for (const auto& l : inst.labels) li.targets.push_back(block_id(l));
            for (const auto& v : inst.operands) li.ops.push_back(operand(v, slots));
            break;
          case Opcode::Phi:
            for (std::size_t i = 0; i < inst.operands.size(); ++i)
              li.phis.push_back({block_id(inst.labels.at(i)), operand(inst.operands[i], slots)});
            break;
          case Opcode::Call: {
            auto fit = function_ids_.find(inst.callee);
            if (fit != function_ids_.end()) {
              li.callee = static_cast<std::int32_t>(fit->second);
            } else {
              li.intrinsic = intrinsic_from(inst.callee);
            }
            for (const auto& v : inst.operands) li.ops.push_back(operand(v, slots));
            break;
          }
          default:
            if (ir::is_cast(inst.opcode)) li.src_kind = inst.operands.at(0).type.kind;
            for (const auto& v : inst.operands) li.ops.push_back(operand(v, slots));
            break;
        }
        if (li.index && module_.injected(li.index) && plan_ && sampler_ && plan_->targets_index(li.index)) {
          switch (li.type) {
            case TypeKind::I32: li.inject_kind = fault::NumericKind::I32, li.inject = true; break;
            case TypeKind::I64: li.inject_kind = fault::NumericKind::I64, li.inject = true; break;
            case TypeKind::F32: li.inject_kind = fault::NumericKind::F32, li.inject = true; break;
            case TypeKind::F64: li.inject_kind = fault::NumericKind::F64, li.inject = true; break;
            default: break;
          }
          if (inst.opcode == Opcode::Store) li.inject = false;
        }
        insts.push_back(std::move(li));
      }
      lf.blocks.push_back(std::move(insts));
    }
    functions_.push_back(std::move(lf));
  }
}

void Machine::push_frame(std::uint32_t fn, const std::vector<std::uint64_t>& args) {
  if (frames_.size() >= options_.max_call_depth) {
    throw Trap{TrapKind::StackOverflow, "call depth exceeds " + std::to_string(options_.max_call_depth)};
  }
  const auto& lf = functions_[fn];
  Frame f;
  f.fn = fn;
  f.regs.assign(lf.slots, 0);
  for (std::size_t i = 0; i < lf.param_slots.size() && i < args.size(); ++i)
    f.regs[lf.param_slots[i]] = args[i] & mask_for(lf.param_kinds[i]);
  f.invocation = ++invocations_[fn];
  f.trips.assign(lf.loop_members.size(), 0);
  frames_.push_back(std::move(f));
}

void Machine::enter_block(Frame& fr, std::uint32_t target) {
  const auto& lf = functions_[fr.fn];
  if (target >= lf.blocks.size()) throw Trap{TrapKind::InvalidBranch, "branch to a missing block"};
  fr.prev_block = fr.block;
  fr.block = target;
  fr.pc = 0;
  for (auto l : lf.loops_by_header[target]) fr.trips[l] = lf.loop_members[l][fr.prev_block] ? fr.trips[l] + 1 : 1;
}

std::uint64_t Machine::load(std::uint64_t addr, TypeKind kind, std::uint64_t size) {
  const std::uint8_t* p = arena_.access(addr, size);
  if (!p) throw Trap{TrapKind::OutOfBounds, "load of " + std::to_string(size) + " bytes at " + hex_of(addr)};
  std::uint64_t v = 0;
  std::memcpy(&v, p, std::min<std::uint64_t>(size, 8));
  return v & mask_for(kind);
}

void Machine::store(std::uint64_t addr, TypeKind, std::uint64_t size, std::uint64_t value) {
  std::uint8_t* p = arena_.access(addr, size);
  if (!p) throw Trap{TrapKind::OutOfBounds, "store of " + std::to_string(size) + " bytes at " + hex_of(addr)};
  std::memcpy(p, &value, std::min<std::uint64_t>(size, 8));
}

std::uint64_t Machine::binary(const LInst& in, std::uint64_t a, std::uint64_t b) {
  const auto k = in.type;
  const auto mask = mask_for(k);
  switch (in.op) {
    case Opcode::Add: return (a + b) & mask;
    case Opcode::Sub: return (a - b) & mask;
    case Opcode::Mul: return (a * b) & mask;
    case Opcode::SDiv:
    case Opcode::SRem: {
      const auto sa = sext(a, k), sb = sext(b, k);
      if (sb == 0) throw Trap{TrapKind::DivisionByZero, "integer division by zero"};
      const std::int64_t min = int_bits(k) == 64 ? std::numeric_limits<std::int64_t>::min()
                                                 : -(std::int64_t{1} << (int_bits(k) - 1));
      if (sa == min && sb == -1) throw Trap{TrapKind::DivisionByZero, "signed division overflow"};
      const auto r = in.op == Opcode::SDiv ? sa / sb : sa % sb;
      return static_cast<std::uint64_t>(r) & mask;
    }
    default:
      break;
  }
  if (k == TypeKind::F32) {
    const float x = std::bit_cast<float>(static_cast<std::uint32_t>(a));
    const float y = std::bit_cast<float>(static_cast<std::uint32_t>(b));
    float r = 0;
    switch (in.op) {
      case Opcode::FAdd: r = x + y; break;
      case Opcode::FSub: r = x - y; break;
      case Opcode::FMul: r = x * y; break;
      case Opcode::FDiv: r = x / y; break;
      default: throw Error("bad float op");
    }
    return float_bits(r);
  }
  const double x = std::bit_cast<double>(a), y = std::bit_cast<double>(b);
  double r = 0;
  switch (in.op) {
    case Opcode::FAdd: r = x + y; break;
    case Opcode::FSub: r = x - y; break;
    case Opcode::FMul: r = x * y; break;
    case Opcode::FDiv: r = x / y; break;
    default: throw Error("bad float op");
  }
  return std::bit_cast<std::uint64_t>(r);
}

std::uint64_t Machine::compare(const LInst& in, std::uint64_t a, std::uint64_t b) const {
  if (in.op == Opcode::ICmp) {
    const auto sa = sext(a, in.src_kind), sb = sext(b, in.src_kind);
    switch (in.pred) {
      case Pred::Eq: return a == b;
      case Pred::Ne: return a != b;
      case Pred::Ugt: return a > b;
      case Pred::Uge: return a >= b;
      case Pred::Ult: return a < b;
      case Pred::Ule: return a <= b;
      case Pred::Sgt: return sa > sb;
      case Pred::Sge: return sa >= sb;
      case Pred::Slt: return sa < sb;
      case Pred::Sle: return sa <= sb;
      default: return 0;
    }
  }
  const double x = as_double(a, in.src_kind), y = as_double(b, in.src_kind);
  const bool unordered = std::isnan(x) || std::isnan(y);
  switch (in.pred) {
    case Pred::FFalse: return 0;
    case Pred::Oeq: return !unordered && x == y;
    case Pred::Ogt: return !unordered && x > y;
    case Pred::Oge: return !unordered && x >= y;
    case Pred::Olt: return !unordered && x < y;
    case Pred::Ole: return !unordered && x <= y;
    case Pred::One: return !unordered && x != y;
    case Pred::Ord: return !unordered;
    case Pred::Uno: return unordered;
    case Pred::Ueq: return unordered || x == y;
    case Pred::FUgt: return unordered || x > y;
    case Pred::FUge: return unordered || x >= y;
    case Pred::FUlt: return unordered || x < y;
    case Pred::FUle: return unordered || x <= y;
    case Pred::Une: return unordered || x != y;
    case Pred::FTrue: return 1;
    default: return 0;
  }
}

std::uint64_t Machine::cast(const LInst& in, std::uint64_t v) const {
  const auto to = in.type, from = in.src_kind;
  switch (in.op) {
    case Opcode::ZExt: return v & mask_for(from) & mask_for(to);
    case Opcode::SExt: return static_cast<std::uint64_t>(sext(v, from)) & mask_for(to);
    case Opcode::Trunc: return v & mask_for(to);
    case Opcode::FPToSI: {
      const double x = as_double(v, from);
      const unsigned bits = int_bits(to);
      const double lo = -std::ldexp(1.0, static_cast<int>(bits) - 1);
      const double hi = std::ldexp(1.0, static_cast<int>(bits) - 1);
      if (std::isnan(x) || x < lo || x >= hi) return static_cast<std::uint64_t>(static_cast<std::int64_t>(lo)) & mask_for(to);
      return static_cast<std::uint64_t>(static_cast<std::int64_t>(x)) & mask_for(to);
    }
    case Opcode::SIToFP: {
      const auto s = sext(v, from);
      if (to == TypeKind::F32) return float_bits(static_cast<float>(s));
      return std::bit_cast<std::uint64_t>(static_cast<double>(s));
    }
    case Opcode::FPExt: return from_double(as_double(v, from), to);
    case Opcode::FPTrunc: return float_bits(static_cast<float>(as_double(v, from)));
    case Opcode::BitCast: return v & mask_for(to);
    default: throw Error("bad cast");
  }
}

std::uint64_t Machine::maybe_inject(const LInst& in, const Frame& fr, std::uint64_t value) {
  if (!in.inject) return value;
  std::uint64_t occurrence = exec_counts_[in.index];
  switch (plan_->scope.mode) {
    case instrument::ScopeMode::NthExecution:
      break;
    case instrument::ScopeMode::Invocation:
      occurrence = fr.invocation;
      break;
    case instrument::ScopeMode::LoopIteration:
      if (in.loop >= 0) occurrence = fr.trips[static_cast<std::size_t>(in.loop)];
      break;
  }
  if (!plan_->scope.matches(occurrence)) return value;
  const double v = fault::numeric_value(in.inject_kind, value);
  if (!std::isfinite(v)) {
    if (options_.strict_non_finite)
      throw Trap{TrapKind::NonFiniteFaultTarget, "fault target holds a non-finite value"};
    out_.log.push_back("skipped activation at ID " + std::to_string(in.index) + " occurrence " +
                       std::to_string(occurrence) + ": non-finite value");
    return value;
  }
  const double error = sampler_->sample_error(v);
  const double limit = sampler_->limit_for(v);
  const std::uint64_t faulted = fault::apply_fault_bits(in.inject_kind, value, error, limit);
  Activation a;
  a.index = in.index;
  a.occurrence = occurrence;
  if (in.trace && out_.trace) a.trace_position = out_.trace->size();
  a.original_bits = value;
  a.faulted_bits = faulted;
  a.error = error;
  a.limit = limit;
  out_.activations.push_back(a);
  ++out_.activation_count;
  return faulted;
}

void Machine::record_trace(const LInst& in, std::uint64_t value) {
  trace::TraceRecord r;
  r.index = in.index;
  r.opcode = std::string(ir::opcode_name(in.op));
  if (in.op == Opcode::Store) {
    r.bits = 0;
    r.width = 4;
  } else {
    r.width = width_bytes(in.type) == 8 ? 8 : 4;
    r.bits = value;
  }
  r.position = out_.trace->size();
  out_.trace->push_back(std::move(r));
}

void Machine::finish(const LInst& in, Frame& fr, std::uint64_t value) {
  value = maybe_inject(in, fr, value);
  if (in.dst >= 0) fr.regs[static_cast<std::size_t>(in.dst)] = value;
  if (in.trace) record_trace(in, value);
  ++fr.pc;
}

RunOutcome Machine::run() {
  auto main_it = function_ids_.find("main");
  if (main_it == function_ids_.end()) throw Error("module has no @main");

  try {
    std::vector<std::uint64_t> main_args;
    if (!functions_[main_it->second].param_slots.empty()) {
      const auto name = arena_.allocate(5, 1, Region::Global);
      std::memcpy(arena_.access(name, 5), "lcfi", 5);
      const auto argv = arena_.allocate(16, 8, Region::Global);
      std::memcpy(arena_.access(argv, 8), &name, 8);
      main_args = {1, argv};
    }
    push_frame(main_it->second, main_args);

    while (!frames_.empty()) {
      Frame& fr = frames_.back();
      const LFunction& fn = functions_[fr.fn];
      if (fr.pc >= fn.blocks[fr.block].size()) throw Trap{TrapKind::InvalidBranch, "fell off the end of a block"};
      const LInst& in = fn.blocks[fr.block][fr.pc];
      current_ = &in;
      if (out_.instructions_executed >= options_.budget) {
        out_.status = RunStatus::BudgetExhausted;
        break;
      }
      ++out_.instructions_executed;
      if (in.index) ++exec_counts_[in.index];

      switch (in.op) {
        case Opcode::Alloca: {
          const auto addr = arena_.allocate(in.size, in.align, Region::Stack);
          fr.allocas.push_back(addr);
          finish(in, fr, addr);
          break;
        }
        case Opcode::Load:
          finish(in, fr, load(get(fr, in.ops[0]), in.type, in.size));
          break;
        case Opcode::Store:
          store(get(fr, in.ops[1]), in.type, in.size, get(fr, in.ops[0]));
          if (in.trace) record_trace(in, 0);
          ++fr.pc;
          break;
        case Opcode::GetElementPtr: {
          std::uint64_t addr = get(fr, in.ops[0]);
          for (const auto& st : in.steps) {
            if (st.is_field)
              addr += st.field_offset;
            else
              addr += static_cast<std::uint64_t>(sext(get(fr, st.index), st.index.kind)) * st.scale;
          }
          finish(in, fr, addr);
          break;
        }
        case Opcode::Add:
        case Opcode::Sub:
        case Opcode::Mul:
        case Opcode::SDiv:
        case Opcode::SRem:
        case Opcode::FAdd:
        case Opcode::FSub:
        case Opcode::FMul:
        case Opcode::FDiv:
          finish(in, fr, binary(in, get(fr, in.ops[0]), get(fr, in.ops[1])));
          break;
        case Opcode::FNeg: {
          const auto v = get(fr, in.ops[0]);
          finish(in, fr, in.type == TypeKind::F32 ? (v ^ 0x80000000ULL) : (v ^ 0x8000000000000000ULL));
          break;
        }
        case Opcode::ICmp:
        case Opcode::FCmp:
          finish(in, fr, compare(in, get(fr, in.ops[0]), get(fr, in.ops[1])));
          break;
        case Opcode::Select:
          finish(in, fr, (get(fr, in.ops[0]) & 1) ? get(fr, in.ops[1]) : get(fr, in.ops[2]));
          break;
        case Opcode::Phi: {
          if (fr.pc == 0) {
            fr.phi_values.clear();
            for (const auto& p : fn.blocks[fr.block]) {
              if (p.op != Opcode::Phi) break;
              auto it = std::find_if(p.phis.begin(), p.phis.end(),
                                     [&](const PhiIn& pi) { return pi.block == fr.prev_block; });
              if (it == p.phis.end()) throw Trap{TrapKind::InvalidBranch, "phi has no value for the incoming edge"};
              fr.phi_values.push_back(get(fr, it->value));
            }
          }
          finish(in, fr, fr.phi_values.at(fr.pc));
          break;
        }
        case Opcode::Br:
          if (in.ops.empty())
            enter_block(fr, in.targets.at(0));
          else
            enter_block(fr, (get(fr, in.ops[0]) & 1) ? in.targets.at(0) : in.targets.at(1));
          break;
        case Opcode::Call: {
          if (in.callee >= 0) {
            std::vector<std::uint64_t> args;
            args.reserve(in.ops.size());
            for (const auto& o : in.ops) args.push_back(get(fr, o));
            push_frame(static_cast<std::uint32_t>(in.callee), args);
            break;
          }
          if (in.intrinsic == Intrinsic::None)
            throw Trap{TrapKind::BadIntrinsicArg, "call to unsupported external function @" + in.src->callee};
          std::vector<FormatArg> args;
          args.reserve(in.ops.size());
          for (const auto& o : in.ops) args.push_back({o.kind, get(fr, o)});
          finish(in, fr, call_intrinsic(in, args) & mask_for(in.type));
          break;
        }
        case Opcode::Ret: {
          const std::uint64_t value = in.ops.empty() ? 0 : get(fr, in.ops[0]);
          for (auto a : fr.allocas) arena_.release(a);
          frames_.pop_back();
          if (frames_.empty()) {
            out_.exit_code = static_cast<std::int32_t>(value);
            break;
          }
          Frame& caller = frames_.back();
          const LInst& call = functions_[caller.fn].blocks[caller.block][caller.pc];
          current_ = &call;
          finish(call, caller, value & mask_for(call.type));
          break;
        }
        default:
          if (ir::is_cast(in.op)) {
            finish(in, fr, cast(in, get(fr, in.ops[0])));
            break;
          }
          throw Error("unsupported opcode " + std::string(ir::opcode_name(in.op)));
      }
    }
  } catch (const Trap& t) {
    out_.status = RunStatus::Trapped;
    TrapInfo info;
    info.kind = t.kind;
    info.message = t.message;
    if (current_) {
      info.index = current_->index;
      info.occurrence = current_->index ? exec_counts_[current_->index] : 0;
    }
    out_.trap = info;
  }
  return std::move(out_);
}

}  // namespace detail

RunOutcome execute(const instrument::InstrumentedModule& module, const IoConfig& io,
                   const instrument::InjectionPlan* plan, fault::Sampler* sampler, const ExecOptions& options) {
  detail::Machine m(module, io, plan, sampler, options);
  return m.run();
}

}  // namespace lcfi::vm
