#include <bit>
#include <cmath>
#include <cstring>

#include "machine_impl.hpp"

namespace lcfi::vm::detail {

namespace {

double arg_double(const std::vector<FormatArg>& args, std::size_t i, const char* who) {
  if (i >= args.size() || args[i].kind != ir::TypeKind::F64)
    throw Trap{TrapKind::BadIntrinsicArg, std::string(who) + " expects a double argument"};
  return std::bit_cast<double>(args[i].bits);
}

std::uint64_t arg_word(const std::vector<FormatArg>& args, std::size_t i, const char* who) {
  if (i >= args.size()) throw Trap{TrapKind::BadIntrinsicArg, std::string(who) + ": missing argument"};
  return args[i].bits;
}

std::uint64_t arg_pointer(const std::vector<FormatArg>& args, std::size_t i, const char* who) {
  if (i >= args.size() || args[i].kind != ir::TypeKind::Pointer)
    throw Trap{TrapKind::BadIntrinsicArg, std::string(who) + " expects a pointer argument"};
  return args[i].bits;
}

std::uint64_t dbl(double d) { return std::bit_cast<std::uint64_t>(d); }

}  // namespace

std::string Machine::read_string(std::uint64_t addr) {
  std::string s;
  if (!arena_.read_cstring(addr, s)) throw Trap{TrapKind::OutOfBounds, "unterminated or invalid string pointer"};
  return s;
}

std::uint64_t Machine::new_stream(Stream s) {
  const auto h = arena_.allocate(1, 1, Region::Handle);
  streams_.emplace(h, std::move(s));
  return h;
}

Stream& Machine::stream_at(std::uint64_t handle, const char* who) {
  auto it = streams_.find(handle);
  if (it == streams_.end()) throw Trap{TrapKind::BadIntrinsicArg, std::string(who) + ": invalid FILE handle"};
  return it->second;
}

const std::string* Machine::input_file(const std::string& name) const {
  if (auto it = inputs_.find(name); it != inputs_.end()) return &it->second;
  if (auto it = out_.output_files.find(name); it != out_.output_files.end()) return &it->second;
  return nullptr;
}

bool Machine::write_stream(Stream& s, const std::string& text) {
  if (!s.open) return false;
  switch (s.sink) {
    case Stream::Sink::None:
      return false;
    case Stream::Sink::Stdout:
      out_.stdout_text += text;
      if (!s.file.empty()) out_.output_files[s.file] += text;
      return true;
    case Stream::Sink::Stderr:
      out_.stderr_text += text;
      if (!s.file.empty()) out_.output_files[s.file] += text;
      return true;
    case Stream::Sink::File:
      out_.output_files[s.file] += text;
      return true;
  }
  return false;
}

std::uint64_t Machine::do_scan(Stream& s, const std::string& fmt, const std::vector<FormatArg>& args,
                               std::size_t first) {
  if (!s.open || !s.readable) return static_cast<std::uint64_t>(-1);
  ScanResult r;
  try {
    r = scan_input(fmt, s.input, s.pos);
  } catch (const FormatFailure& e) {
    throw Trap{TrapKind::BadIntrinsicArg, e.what()};
  }
  for (std::size_t i = 0; i < r.stores.size(); ++i) {
    const auto dst = arg_pointer(args, first + i, "scanf");
    const auto& st = r.stores[i];
    std::uint64_t n = 0;
    switch (st.kind) {
      case ScanStore::Kind::I8: n = 1; break;
      case ScanStore::Kind::I16: n = 2; break;
      case ScanStore::Kind::I32:
      case ScanStore::Kind::F32: n = 4; break;
      case ScanStore::Kind::I64:
      case ScanStore::Kind::F64: n = 8; break;
      case ScanStore::Kind::Bytes: n = st.bytes.size(); break;
    }
    std::uint8_t* p = arena_.access(dst, n);
    if (!p) throw Trap{TrapKind::OutOfBounds, "scanf writes outside its destination"};
    if (st.kind == ScanStore::Kind::Bytes)
      std::memcpy(p, st.bytes.data(), n);
    else
      std::memcpy(p, &st.bits, n);
  }
  if (r.assigned == 0 && r.input_failure_first) return static_cast<std::uint64_t>(-1);
  return static_cast<std::uint64_t>(r.assigned);
}

std::uint64_t Machine::call_intrinsic(const LInst& in, const std::vector<FormatArg>& args) {
  auto format = [&](std::size_t fmt_at) {
    const std::string fmt = read_string(arg_pointer(args, fmt_at, "printf"));
    try {
      return format_printf(fmt, std::span<const FormatArg>(args).subspan(fmt_at + 1),
                           [this](std::uint64_t a) { return read_string(a); });
    } catch (const FormatFailure& e) {
      throw Trap{TrapKind::BadIntrinsicArg, e.what()};
    }
  };

  switch (in.intrinsic) {
    case Intrinsic::Printf: {
      const std::string text = format(0);
      if (!write_stream(streams_.at(stdout_), text)) return static_cast<std::uint64_t>(-1);
      return text.size();
    }
    case Intrinsic::Fprintf: {
      Stream& s = stream_at(arg_pointer(args, 0, "fprintf"), "fprintf");
      const std::string text = format(1);
      if (!write_stream(s, text)) return static_cast<std::uint64_t>(-1);
      return text.size();
    }
    case Intrinsic::Scanf:
      return do_scan(streams_.at(stdin_), read_string(arg_pointer(args, 0, "scanf")), args, 1);
    case Intrinsic::Fscanf: {
      Stream& s = stream_at(arg_pointer(args, 0, "fscanf"), "fscanf");
      return do_scan(s, read_string(arg_pointer(args, 1, "fscanf")), args, 2);
    }
    case Intrinsic::Fopen:
    case Intrinsic::Freopen: {
      const std::string path = read_string(arg_pointer(args, 0, "fopen"));
      const std::string mode = read_string(arg_pointer(args, 1, "fopen"));
      if (mode.empty() || !std::strchr("rwa", mode[0]))
        throw Trap{TrapKind::BadIntrinsicArg, "unsupported fopen mode '" + mode + "'"};
      Stream fresh;
      if (mode[0] == 'r') {
        const std::string* data = input_file(path);
        if (!data) {
          if (in.intrinsic == Intrinsic::Freopen) stream_at(arg_pointer(args, 2, "freopen"), "freopen").open = false;
          return 0;
        }
        fresh.readable = true;
        fresh.input = *data;
      } else {
        fresh.sink = Stream::Sink::File;
        fresh.file = path;
        auto& buf = out_.output_files[path];
        if (mode[0] == 'w') buf.clear();
      }
      if (in.intrinsic == Intrinsic::Fopen) return new_stream(std::move(fresh));
      const auto h = arg_pointer(args, 2, "freopen");
      Stream& s = stream_at(h, "freopen");
      if (fresh.sink == Stream::Sink::File && (s.sink == Stream::Sink::Stdout || s.sink == Stream::Sink::Stderr))
        fresh.sink = s.sink;
      s = std::move(fresh);
      return h;
    }
    case Intrinsic::Fclose: {
      Stream& s = stream_at(arg_pointer(args, 0, "fclose"), "fclose");
      if (!s.open) throw Trap{TrapKind::BadIntrinsicArg, "fclose of a closed stream"};
      s.open = false;
      return 0;
    }
    case Intrinsic::Sqrt: return dbl(std::sqrt(arg_double(args, 0, "sqrt")));
    case Intrinsic::Fabs: return dbl(std::fabs(arg_double(args, 0, "fabs")));
    case Intrinsic::Pow: return dbl(std::pow(arg_double(args, 0, "pow"), arg_double(args, 1, "pow")));
    case Intrinsic::Exp: return dbl(std::exp(arg_double(args, 0, "exp")));
    case Intrinsic::Log: return dbl(std::log(arg_double(args, 0, "log")));
    case Intrinsic::Malloc:
      return arena_.allocate(arg_word(args, 0, "malloc"), 16, Region::Heap);
    case Intrinsic::Calloc: {
      const auto n = arg_word(args, 0, "calloc"), size = arg_word(args, 1, "calloc");
      if (size != 0 && n > (std::uint64_t{1} << 40) / size)
        throw Trap{TrapKind::BadIntrinsicArg, "calloc size overflow"};
      return arena_.allocate(n * size, 16, Region::Heap);
    }
    case Intrinsic::Free: {
      const auto p = arg_pointer(args, 0, "free");
      if (p == 0) return 0;
      Allocation* a = arena_.record(p);
      if (!a || a->region != Region::Heap || !a->live)
        throw Trap{TrapKind::BadIntrinsicArg, "free of a pointer not returned by malloc"};
      arena_.release(p);
      return 0;
    }
    case Intrinsic::Memset: {
      const auto dst = arg_pointer(args, 0, "memset");
      const auto value = static_cast<int>(arg_word(args, 1, "memset") & 0xff);
      const auto n = arg_word(args, 2, "memset");
      std::uint8_t* p = arena_.access(dst, n);
      if (!p) throw Trap{TrapKind::OutOfBounds, "memset outside its destination"};
      std::memset(p, value, n);
      return dst;
    }
    case Intrinsic::Memcpy: {
      const auto dst = arg_pointer(args, 0, "memcpy");
      const auto src = arg_pointer(args, 1, "memcpy");
      const auto n = arg_word(args, 2, "memcpy");
      const std::uint8_t* s = arena_.access(src, n);
      if (!s) throw Trap{TrapKind::OutOfBounds, "memcpy reads outside its source"};
      std::vector<std::uint8_t> tmp(s, s + n);
      std::uint8_t* d = arena_.access(dst, n);
      if (!d) throw Trap{TrapKind::OutOfBounds, "memcpy writes outside its destination"};
      if (n) std::memcpy(d, tmp.data(), n);
      return dst;
    }
    case Intrinsic::None:
      break;
  }
  throw Trap{TrapKind::BadIntrinsicArg, "unsupported external function @" + in.src->callee};
}

}  // namespace lcfi::vm::detail
