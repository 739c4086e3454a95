#include "lcfi/ir/printer.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace lcfi::ir {

namespace {

bool plain_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
                    c == '$' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string escape_bytes(const std::string& bytes) {
  std::string out;
  for (unsigned char c : bytes) {
    if (c >= 0x20 && c < 0x7f && c != '"' && c != '\\') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "\\%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string sigil_name(char sigil, const std::string& name) {
  if (plain_name(name)) return sigil + name;
  return std::string(1, sigil) + "\"" + escape_bytes(name) + "\"";
}

std::string format_float(double d) {
  if (!std::isfinite(d)) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%016llX",
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(d)));
    return buf;
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::scientific);
  (void)ec;
  std::string s(buf, end);
  auto e = s.find('e');
  if (s.find('.') == std::string::npos) s.insert(e, ".0");
  return s;
}

std::string typed(const Value& v) { return to_string(v.type) + " " + print_value(v); }

void append_flags(std::string& out, const std::vector<std::string>& flags) {
  for (const auto& f : flags) out += f + " ";
}

}  // namespace

std::string print_value(const Value& v) {
  switch (v.kind) {
    case ValueKind::Register: return sigil_name('%', v.name);
    case ValueKind::Global: return sigil_name('@', v.name);
    case ValueKind::Int:
      if (v.type.kind == TypeKind::I1) return v.int_value ? "true" : "false";
      return std::to_string(v.int_value);
    case ValueKind::Float: return format_float(v.float_value);
    case ValueKind::Null: return "null";
    case ValueKind::Zero: return "zeroinitializer";
    case ValueKind::String: return "c\"" + escape_bytes(v.bytes) + "\"";
    case ValueKind::Aggregate: {
      const bool is_array = v.type.kind == TypeKind::Array;
      std::string out = is_array ? "[" : "{ ";
      for (std::size_t i = 0; i < v.elements.size(); ++i) {
        if (i) out += ", ";
        out += typed(v.elements[i]);
      }
      return out + (is_array ? "]" : " }");
    }
    case ValueKind::ConstGep: {
      std::string out = "getelementptr ";
      if (v.inbounds) out += "inbounds ";
      out += "(" + to_string(v.gep_source) + ", " + to_string(Type::pointer_to(v.gep_source)) +
             " " + sigil_name('@', v.name);
      for (const auto& idx : v.elements) out += ", " + typed(idx);
      return out + ")";
    }
  }
  return "?";
}

std::string print_instruction(const Instruction& inst) {
  std::string out;
  if (inst.result) out += sigil_name('%', *inst.result) + " = ";
  out += std::string(opcode_name(inst.opcode)) + " ";
  switch (inst.opcode) {
    case Opcode::Alloca:
      out += to_string(inst.aux_type);
      break;
    case Opcode::Load:
      append_flags(out, inst.flags);
      out += to_string(inst.aux_type) + ", " + typed(inst.operands[0]);
      break;
    case Opcode::Store:
      append_flags(out, inst.flags);
      out += typed(inst.operands[0]) + ", " + typed(inst.operands[1]);
      break;
    case Opcode::GetElementPtr:
      append_flags(out, inst.flags);
      out += to_string(inst.aux_type);
      for (const auto& op : inst.operands) out += ", " + typed(op);
      break;
    case Opcode::ICmp:
    case Opcode::FCmp:
      append_flags(out, inst.flags);
      out += inst.predicate + " " + typed(inst.operands[0]) + ", " + print_value(inst.operands[1]);
      break;
    case Opcode::Br:
      if (inst.operands.empty()) {
        out += "label " + sigil_name('%', inst.labels[0]);
      } else {
        out += typed(inst.operands[0]) + ", label " + sigil_name('%', inst.labels[0]) +
               ", label " + sigil_name('%', inst.labels[1]);
      }
      break;
    case Opcode::Phi:
      append_flags(out, inst.flags);
      out += to_string(inst.type) + " ";
      for (std::size_t i = 0; i < inst.operands.size(); ++i) {
        if (i) out += ", ";
        out += "[ " + print_value(inst.operands[i]) + ", " + sigil_name('%', inst.labels[i]) + " ]";
      }
      break;
    case Opcode::Call: {
      append_flags(out, inst.flags);
      out += to_string(inst.type) + " ";
      if (inst.signature) {
        out += "(";
        for (std::size_t i = 0; i < inst.signature->params.size(); ++i) {
          if (i) out += ", ";
          out += to_string(inst.signature->params[i]);
        }
        if (inst.signature->varargs) out += inst.signature->params.empty() ? "..." : ", ...";
        out += ") ";
      }
      out += sigil_name('@', inst.callee) + "(";
      for (std::size_t i = 0; i < inst.operands.size(); ++i) {
        if (i) out += ", ";
        out += typed(inst.operands[i]);
      }
      out += ")";
      break;
    }
    case Opcode::Ret:
      out += inst.operands.empty() ? "void" : typed(inst.operands[0]);
      break;
    case Opcode::Select:
      append_flags(out, inst.flags);
      out += typed(inst.operands[0]) + ", " + typed(inst.operands[1]) + ", " +
             typed(inst.operands[2]);
      break;
    case Opcode::FNeg:
      append_flags(out, inst.flags);
      out += typed(inst.operands[0]);
      break;
    default:
      if (is_cast(inst.opcode)) {
        out += typed(inst.operands[0]) + " to " + to_string(inst.type);
      } else {
        append_flags(out, inst.flags);
        out += typed(inst.operands[0]) + ", " + print_value(inst.operands[1]);
      }
      break;
  }
  if (inst.align) out += ", align " + std::to_string(*inst.align);
  return out;
}

std::string print_module(const IrModule& m, const PrintOptions& options) {
  std::string out = "; ModuleID = '" + m.source_name + "'\n";
  if (!m.types.empty()) out += "\n";
  for (const auto& [name, body] : m.types) {
    out += sigil_name('%', name) + " = type ";
    out += body ? to_string(Type::literal_struct(*body)) : "opaque";
    out += "\n";
  }
  if (!m.globals.empty()) out += "\n";
  for (const auto& g : m.globals) {
    out += sigil_name('@', g.name) + " = ";
    if (!g.initializer) out += "external ";
    out += g.is_constant ? "constant " : "global ";
    out += to_string(g.type);
    if (g.initializer) out += " " + print_value(*g.initializer);
    if (g.align) out += ", align " + std::to_string(*g.align);
    out += "\n";
  }
  for (const auto& f : m.functions) {
    out += "\ndefine " + to_string(f.return_type) + " " + sigil_name('@', f.name) + "(";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) out += ", ";
      out += to_string(f.params[i].type) + " " + sigil_name('%', f.params[i].name);
    }
    out += ") {\n";
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
      const auto& blk = f.blocks[b];
      const bool numeric =
          !blk.label.empty() && blk.label.find_first_not_of("0123456789") == std::string::npos;
      if (b > 0) out += "\n";
      if (b > 0 || !numeric) {
        out += plain_name(blk.label) ? blk.label : "\"" + escape_bytes(blk.label) + "\"";
        out += ":\n";
      }
      for (const auto& inst : blk.instructions) {
        out += "  " + print_instruction(inst);
        if (inst.index) {
          out += "  ; !lcfi_index " + std::to_string(*inst.index);
          if (options.markers) {
            std::string extra = options.markers(*inst.index);
            if (!extra.empty()) out += " " + extra;
          }
        }
        out += "\n";
      }
    }
    out += "}\n";
  }
  if (!m.declarations.empty()) out += "\n";
  for (const auto& d : m.declarations) {
    out += "declare " + to_string(d.return_type) + " " + sigil_name('@', d.name) + "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      if (i) out += ", ";
      out += to_string(d.params[i]);
    }
    if (d.varargs) out += d.params.empty() ? "..." : ", ...";
    out += ")\n";
  }
  return out;
}

}  // namespace lcfi::ir
