#include "lcfi/ir/type.hpp"

#include <algorithm>

#include "lcfi/error.hpp"

namespace lcfi::ir {

Type Type::pointer_to(Type pointee) {
  Type t;
  t.kind = TypeKind::Pointer;
  t.elems.push_back(std::move(pointee));
  return t;
}

Type Type::array_of(std::uint64_t n, Type element) {
  Type t;
  t.kind = TypeKind::Array;
  t.count = n;
  t.elems.push_back(std::move(element));
  return t;
}

Type Type::literal_struct(std::vector<Type> fields) {
  Type t;
  t.kind = TypeKind::Struct;
  t.elems = std::move(fields);
  return t;
}

Type Type::named_struct(std::string name) {
  Type t;
  t.kind = TypeKind::Struct;
  t.name = std::move(name);
  return t;
}

bool Type::is_integer() const {
  switch (kind) {
    case TypeKind::I1:
    case TypeKind::I8:
    case TypeKind::I32:
    case TypeKind::I64:
      return true;
    default:
      return false;
  }
}

unsigned Type::int_bits() const {
  switch (kind) {
    case TypeKind::I1: return 1;
    case TypeKind::I8: return 8;
    case TypeKind::I32: return 32;
    case TypeKind::I64: return 64;
    default: return 0;
  }
}

std::string to_string(const Type& t) {
  switch (t.kind) {
    case TypeKind::Void: return "void";
    case TypeKind::I1: return "i1";
    case TypeKind::I8: return "i8";
    case TypeKind::I32: return "i32";
    case TypeKind::I64: return "i64";
    case TypeKind::F32: return "float";
    case TypeKind::F64: return "double";
    case TypeKind::Pointer: return to_string(t.pointee()) + "*";
    case TypeKind::Array:
      return "[" + std::to_string(t.count) + " x " + to_string(t.element()) + "]";
    case TypeKind::Struct: {
      if (!t.name.empty()) return "%" + t.name;
      if (t.elems.empty()) return "{}";
      std::string out = "{ ";
      for (std::size_t i = 0; i < t.elems.size(); ++i) {
        if (i) out += ", ";
        out += to_string(t.elems[i]);
      }
      return out + " }";
    }
  }
  return "?";
}

const std::vector<Type>& struct_fields(const Type& t, const TypeTable& table) {
  if (t.name.empty()) return t.elems;
  auto it = table.find(t.name);
  if (it == table.end()) throw Error("undefined struct type %" + t.name);
  if (!it->second) throw Error("opaque struct type %" + t.name + " has no layout");
  return *it->second;
}

std::uint64_t align_of(const Type& t, const TypeTable& table) {
  switch (t.kind) {
    case TypeKind::Void: throw Error("void has no layout");
    case TypeKind::I1:
    case TypeKind::I8: return 1;
    case TypeKind::I32:
    case TypeKind::F32: return 4;
    case TypeKind::I64:
    case TypeKind::F64:
    case TypeKind::Pointer: return 8;
    case TypeKind::Array: return align_of(t.element(), table);
    case TypeKind::Struct: {
      std::uint64_t a = 1;
      for (const auto& f : struct_fields(t, table)) a = std::max(a, align_of(f, table));
      return a;
    }
  }
  return 1;
}

static std::uint64_t round_up(std::uint64_t v, std::uint64_t a) { return (v + a - 1) / a * a; }

std::uint64_t size_of(const Type& t, const TypeTable& table) {
  switch (t.kind) {
    case TypeKind::Void: throw Error("void has no layout");
    case TypeKind::I1:
    case TypeKind::I8: return 1;
    case TypeKind::I32:
    case TypeKind::F32: return 4;
    case TypeKind::I64:
    case TypeKind::F64:
    case TypeKind::Pointer: return 8;
    case TypeKind::Array: return t.count * size_of(t.element(), table);
    case TypeKind::Struct: {
      std::uint64_t off = 0;
      for (const auto& f : struct_fields(t, table)) {
        off = round_up(off, align_of(f, table)) + size_of(f, table);
      }
      return round_up(off, align_of(t, table));
    }
  }
  return 0;
}

std::uint64_t field_offset(const Type& t, std::size_t field, const TypeTable& table) {
  const auto& fields = struct_fields(t, table);
  if (field >= fields.size()) throw Error("struct field index out of range");
  std::uint64_t off = 0;
  for (std::size_t i = 0; i <= field; ++i) {
    off = round_up(off, align_of(fields[i], table));
    if (i < field) off += size_of(fields[i], table);
  }
  return off;
}

}  // namespace lcfi::ir
