#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lcfi::ir {

enum class TypeKind : std::uint8_t {
  Void,
  I1,
  I8,
  I32,
  I64,
  F32,
  F64,
  Pointer,
  Array,
  Struct,
};

// Value-semantic IR type. Named structs carry only their name; their fields
// live in the owning module's TypeTable so recursive definitions stay finite.
struct Type {
  TypeKind kind = TypeKind::Void;
  std::vector<Type> elems;  // pointee, array element, or literal struct fields
  std::uint64_t count = 0;  // array length
  std::string name;         // named struct ("struct.point"), empty otherwise

  static Type void_type() { return {}; }
  static Type i1() { return {TypeKind::I1, {}, 0, {}}; }
  static Type i8() { return {TypeKind::I8, {}, 0, {}}; }
  static Type i32() { return {TypeKind::I32, {}, 0, {}}; }
  static Type i64() { return {TypeKind::I64, {}, 0, {}}; }
  static Type f32() { return {TypeKind::F32, {}, 0, {}}; }
  static Type f64() { return {TypeKind::F64, {}, 0, {}}; }
  static Type pointer_to(Type pointee);
  static Type array_of(std::uint64_t n, Type element);
  static Type literal_struct(std::vector<Type> fields);
  static Type named_struct(std::string name);

  bool is_void() const { return kind == TypeKind::Void; }
  bool is_integer() const;
  bool is_float() const { return kind == TypeKind::F32 || kind == TypeKind::F64; }
  bool is_pointer() const { return kind == TypeKind::Pointer; }
  bool is_aggregate() const { return kind == TypeKind::Array || kind == TypeKind::Struct; }
  bool is_first_class_scalar() const { return is_integer() || is_float() || is_pointer(); }
  const Type& pointee() const { return elems.front(); }
  const Type& element() const { return elems.front(); }

  // Integer bit width (1, 8, 32, 64); 0 for non-integers.
  unsigned int_bits() const;

  bool operator==(const Type&) const = default;
};

// Named struct definitions. A missing body (`type opaque`) is std::nullopt.
using TypeTable = std::map<std::string, std::optional<std::vector<Type>>>;

std::string to_string(const Type& t);

// Data layout, x86-64 style natural alignment. Throws lcfi::Error for opaque
// or undefined named structs and for void.
std::uint64_t size_of(const Type& t, const TypeTable& table);
std::uint64_t align_of(const Type& t, const TypeTable& table);
std::uint64_t field_offset(const Type& struct_type, std::size_t field, const TypeTable& table);
const std::vector<Type>& struct_fields(const Type& struct_type, const TypeTable& table);

}  // namespace lcfi::ir
