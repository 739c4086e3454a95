#include "format.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace lcfi::vm::detail {

namespace {

template <typename... A>
std::string c_format(const std::string& spec, A... args) {
  const int n = std::snprintf(nullptr, 0, spec.c_str(), args...);
  if (n < 0) throw FormatFailure("formatting failed for '" + spec + "'");
  std::string out(static_cast<std::size_t>(n) + 1, '\0');
  std::snprintf(out.data(), out.size(), spec.c_str(), args...);
  out.resize(static_cast<std::size_t>(n));
  return out;
}

bool is_int(ir::TypeKind k) {
  return k == ir::TypeKind::I1 || k == ir::TypeKind::I8 || k == ir::TypeKind::I32 || k == ir::TypeKind::I64;
}

std::int64_t signed_value(const FormatArg& a) {
  switch (a.kind) {
    case ir::TypeKind::I1: return static_cast<std::int64_t>(a.bits & 1);
    case ir::TypeKind::I8: return static_cast<std::int8_t>(a.bits);
    case ir::TypeKind::I32: return static_cast<std::int32_t>(a.bits);
    default: return static_cast<std::int64_t>(a.bits);
  }
}

double float_value(const FormatArg& a) {
  if (a.kind == ir::TypeKind::F64) {
    double d;
    std::memcpy(&d, &a.bits, sizeof d);
    return d;
  }
  float f;
  const auto lo = static_cast<std::uint32_t>(a.bits);
  std::memcpy(&f, &lo, sizeof f);
  return f;
}

}  // namespace

std::string format_printf(std::string_view fmt, std::span<const FormatArg> args,
                          const std::function<std::string(std::uint64_t)>& read_string) {
  std::string out;
  std::size_t next = 0;
  auto take = [&](const char* what) -> const FormatArg& {
    if (next >= args.size()) throw FormatFailure(std::string("missing argument for ") + what);
    return args[next++];
  };

  for (std::size_t i = 0; i < fmt.size(); ++i) {
    if (fmt[i] != '%') {
      out.push_back(fmt[i]);
      continue;
    }
    std::string spec = "%";
    ++i;
    while (i < fmt.size() && std::strchr("-+ #0", fmt[i])) spec.push_back(fmt[i++]);
    if (i < fmt.size() && fmt[i] == '*') {
      const auto& w = take("'*' width");
      if (!is_int(w.kind)) throw FormatFailure("'*' width must be an integer");
      spec += std::to_string(static_cast<int>(signed_value(w)));
      ++i;
    } else {
      while (i < fmt.size() && std::isdigit(static_cast<unsigned char>(fmt[i]))) spec.push_back(fmt[i++]);
    }
    if (i < fmt.size() && fmt[i] == '.') {
      spec.push_back(fmt[i++]);
      if (i < fmt.size() && fmt[i] == '*') {
        const auto& p = take("'*' precision");
        if (!is_int(p.kind)) throw FormatFailure("'*' precision must be an integer");
        spec += std::to_string(static_cast<int>(signed_value(p)));
        ++i;
      } else {
        while (i < fmt.size() && std::isdigit(static_cast<unsigned char>(fmt[i]))) spec.push_back(fmt[i++]);
      }
    }
    std::string length;
    while (i < fmt.size() && std::strchr("hlLzjt", fmt[i])) length.push_back(fmt[i++]);
    if (i >= fmt.size()) throw FormatFailure("incomplete conversion at end of format");
    const char conv = fmt[i];
    const bool wide = length == "l" || length == "ll" || length == "z" || length == "j" || length == "t";
    switch (conv) {
      case '%':
        out.push_back('%');
        break;
      case 'd':
      case 'i': {
        const auto& a = take("%d");
        if (!is_int(a.kind)) throw FormatFailure("%d expects an integer argument");
        std::int64_t v = signed_value(a);
        if (length == "hh") v = static_cast<signed char>(v);
        else if (length == "h") v = static_cast<short>(v);
        else if (!wide) v = static_cast<int>(v);
        out += c_format(spec + "lld", static_cast<long long>(v));
        break;
      }
      case 'u':
      case 'x':
      case 'X':
      case 'o': {
        const auto& a = take("%u");
        if (!is_int(a.kind)) throw FormatFailure(std::string("%") + conv + " expects an integer argument");
        std::uint64_t v = static_cast<std::uint64_t>(signed_value(a));
        if (length == "hh") v = static_cast<unsigned char>(v);
        else if (length == "h") v = static_cast<unsigned short>(v);
        else if (!wide) v = static_cast<unsigned int>(v);
        out += c_format(spec + "ll" + conv, static_cast<unsigned long long>(v));
        break;
      }
      case 'c': {
        const auto& a = take("%c");
        if (!is_int(a.kind)) throw FormatFailure("%c expects an integer argument");
        out += c_format(spec + "c", static_cast<int>(static_cast<unsigned char>(a.bits)));
        break;
      }
      case 's': {
        const auto& a = take("%s");
        if (a.kind != ir::TypeKind::Pointer) throw FormatFailure("%s expects a pointer argument");
        const std::string s = read_string(a.bits);
        out += c_format(spec + "s", s.c_str());
        break;
      }
      case 'f':
      case 'F':
      case 'e':
      case 'E':
      case 'g':
      case 'G':
      case 'a':
      case 'A': {
        if (length == "L") throw FormatFailure("long double conversions are not supported");
        const auto& a = take("%f");
        if (a.kind != ir::TypeKind::F64 && a.kind != ir::TypeKind::F32)
          throw FormatFailure(std::string("%") + conv + " expects a floating-point argument");
        out += c_format(spec + conv, float_value(a));
        break;
      }
      default:
        throw FormatFailure(std::string("unsupported conversion %") + conv);
    }
  }
  return out;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

void skip_space(const std::string& in, std::size_t& pos) {
  while (pos < in.size() && is_space(in[pos])) ++pos;
}

std::string token(const std::string& in, std::size_t pos, std::size_t width) {
  std::size_t end = pos;
  while (end < in.size() && !is_space(in[end]) && (width == 0 || end - pos < width)) ++end;
  return in.substr(pos, end - pos);
}

}  // namespace

ScanResult scan_input(std::string_view fmt, const std::string& in, std::size_t& pos) {
  ScanResult r;
  bool converted_any = false;
  auto fail_input = [&]() {
    if (!converted_any) r.input_failure_first = true;
    return r;
  };

  for (std::size_t i = 0; i < fmt.size(); ++i) {
    const char f = fmt[i];
    if (is_space(f)) {
      skip_space(in, pos);
      continue;
    }
    if (f != '%') {
      if (pos >= in.size()) return fail_input();
      if (in[pos] != f) return r;
      ++pos;
      continue;
    }
    ++i;
    bool suppress = false;
    if (i < fmt.size() && fmt[i] == '*') suppress = true, ++i;
    std::size_t width = 0;
    while (i < fmt.size() && std::isdigit(static_cast<unsigned char>(fmt[i]))) width = width * 10 + (fmt[i++] - '0');
    std::string length;
    while (i < fmt.size() && std::strchr("hlLzjt", fmt[i])) length.push_back(fmt[i++]);
    if (i >= fmt.size()) throw FormatFailure("incomplete conversion at end of format");
    const char conv = fmt[i];

    if (conv == '%') {
      skip_space(in, pos);
      if (pos >= in.size()) return fail_input();
      if (in[pos] != '%') return r;
      ++pos;
      continue;
    }
    ScanStore st;
    switch (conv) {
      case 'd':
      case 'i':
      case 'u':
      case 'x': {
        skip_space(in, pos);
        if (pos >= in.size()) return fail_input();
        const std::string tok = token(in, pos, width);
        char* end = nullptr;
        const int base = conv == 'i' ? 0 : conv == 'x' ? 16 : 10;
        const long long v = conv == 'u' ? static_cast<long long>(std::strtoull(tok.c_str(), &end, base))
                                        : std::strtoll(tok.c_str(), &end, base);
        if (end == tok.c_str()) return r;
        pos += static_cast<std::size_t>(end - tok.c_str());
        st.bits = static_cast<std::uint64_t>(v);
        if (length == "hh") st.kind = ScanStore::Kind::I8;
        else if (length == "h") st.kind = ScanStore::Kind::I16;
        else if (length.empty()) st.kind = ScanStore::Kind::I32;
        else st.kind = ScanStore::Kind::I64;
        break;
      }
      case 'f':
      case 'e':
      case 'g':
      case 'a':
      case 'E':
      case 'G':
      case 'F': {
        if (length == "L") throw FormatFailure("long double conversions are not supported");
        skip_space(in, pos);
        if (pos >= in.size()) return fail_input();
        const std::string tok = token(in, pos, width);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str()) return r;
        pos += static_cast<std::size_t>(end - tok.c_str());
        if (length == "l") {
          st.kind = ScanStore::Kind::F64;
          std::memcpy(&st.bits, &v, sizeof v);
        } else {
          st.kind = ScanStore::Kind::F32;
          const float fv = static_cast<float>(v);
          std::uint32_t b;
          std::memcpy(&b, &fv, sizeof b);
          st.bits = b;
        }
        break;
      }
      case 's': {
        skip_space(in, pos);
        if (pos >= in.size()) return fail_input();
        st.kind = ScanStore::Kind::Bytes;
        st.bytes = token(in, pos, width);
        pos += st.bytes.size();
        st.bytes.push_back('\0');
        break;
      }
      case 'c': {
        const std::size_t n = width == 0 ? 1 : width;
        if (pos + n > in.size()) return fail_input();
        st.kind = ScanStore::Kind::Bytes;
        st.bytes = in.substr(pos, n);
        pos += n;
        break;
      }
      default:
        throw FormatFailure(std::string("unsupported conversion %") + conv);
    }
    converted_any = true;
    if (!suppress) {
      r.stores.push_back(std::move(st));
      ++r.assigned;
    }
  }
  return r;
}

}  // namespace lcfi::vm::detail
