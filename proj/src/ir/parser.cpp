#include "lcfi/ir/parser.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "lexer.hpp"

namespace lcfi::ir {

ParseError::ParseError(int line, int column, std::string message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(std::move(message)) {}

namespace {

using detail::Tok;
using detail::Token;

const std::set<std::string, std::less<>> kLinkageWords = {
    "private",     "internal",         "external",     "dso_local",  "dso_preemptable",
    "unnamed_addr", "local_unnamed_addr", "linkonce_odr", "linkonce",  "weak",
    "weak_odr",    "common",           "hidden",       "protected",  "default",
    "available_externally", "extern_weak", "appending", "thread_local", "externally_initialized",
};

// Parameter and return attributes that carry no meaning for interpretation.
const std::set<std::string, std::less<>> kParamAttrWords = {
    "noundef",  "nocapture", "readonly", "readnone", "writeonly", "nonnull",  "signext",
    "zeroext",  "noalias",   "returned", "immarg",   "nofree",    "inreg",    "nest",
    "swiftself", "swifterror", "noinline", "alwaysinline",
};

const std::set<std::string, std::less<>> kParamAttrWithArg = {
    "dereferenceable", "dereferenceable_or_null", "byval", "sret", "byref", "preallocated",
    "inalloca", "elementtype", "nofpclass",
};

const std::set<std::string, std::less<>> kFastMathFlags = {
    "fast", "nnan", "ninf", "nsz", "arcp", "contract", "afn", "reassoc",
};

const std::set<std::string, std::less<>> kICmpPreds = {
    "eq", "ne", "ugt", "uge", "ult", "ule", "sgt", "sge", "slt", "sle",
};

const std::set<std::string, std::less<>> kFCmpPreds = {
    "false", "oeq", "ogt", "oge", "olt", "ole", "one", "ord",
    "ueq",   "ugt", "uge", "ult", "ule", "une", "uno", "true",
};

bool is_number(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string_view source_name) : toks_(std::move(toks)) {
    out_.module.source_name = std::string(source_name);
  }

  ParseOutput run(std::string_view text) {
    // "; ModuleID = 'name'" on the first line names the module.
    if (text.rfind("; ModuleID = '", 0) == 0) {
      auto end = text.find('\'', 14);
      if (end != std::string_view::npos) out_.module.source_name = std::string(text.substr(14, end - 14));
    }
    while (!at(Tok::Eof)) top_level();
    flush_warnings();
    return std::move(out_);
  }

 private:
  // ---- token helpers ----
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_word(std::string_view w) const { return cur().kind == Tok::Word && cur().text == w; }
  bool at_punct(char c) const {
    return cur().kind == Tok::Punct && cur().text.size() == 1 && cur().text[0] == c;
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(cur().line, cur().col, msg);
  }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(t.line, t.col, msg);
  }

  void expect_punct(char c) {
    if (!at_punct(c)) {
      fail(std::string("expected '") + c + "'" +
           (at(Tok::Eof) ? " before end of input" : ", found '" + cur().text + "'"));
    }
    next();
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "'");
    next();
  }
  bool accept_punct(char c) {
    if (at_punct(c)) {
      next();
      return true;
    }
    return false;
  }
  bool accept_word(std::string_view w) {
    if (at_word(w)) {
      next();
      return true;
    }
    return false;
  }
  std::uint64_t expect_uint() {
    if (!at(Tok::Int)) fail("expected integer");
    const auto& t = next();
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail_at(t, "malformed integer");
    return v;
  }

  void warn(const std::string& what, int line) {
    auto& w = stripped_[what];
    if (w.count++ == 0) w.first_line = line;
  }
  void flush_warnings() {
    for (const auto& [what, w] : stripped_) {
      Diagnostic d;
      d.severity = Severity::Warning;
      d.line = w.first_line;
      d.message = "stripped " + std::to_string(w.count) + " " + what;
      out_.warnings.push_back(std::move(d));
    }
  }

  // Skips tokens until the line changes (used for metadata definitions).
  void skip_line() {
    const int line = cur().line;
    while (!at(Tok::Eof) && cur().line == line) next();
  }

  void skip_balanced(char open, char close) {
    int depth = 0;
    do {
      if (at(Tok::Eof)) fail(std::string("unterminated '") + open + "'");
      if (at_punct(open)) ++depth;
      if (at_punct(close)) --depth;
      next();
    } while (depth > 0);
  }

  void skip_linkage() {
    while (at(Tok::Word) && kLinkageWords.count(cur().text) && !at_word("external")) {
      warn("linkage/visibility keyword(s)", cur().line);
      next();
    }
  }

  // Skips attribute words (noundef, align 8, dereferenceable(16), ...).
  void skip_param_attrs() {
    while (at(Tok::Word)) {
      if (kParamAttrWords.count(cur().text)) {
        warn("parameter attribute(s)", cur().line);
        next();
      } else if (cur().text == "align") {
        warn("parameter attribute(s)", cur().line);
        next();
        expect_uint();
      } else if (kParamAttrWithArg.count(cur().text) && peek().kind == Tok::Punct &&
                 peek().text == "(") {
        warn("parameter attribute(s)", cur().line);
        next();
        skip_balanced('(', ')');
      } else {
        break;
      }
    }
  }

  // ---- top level ----
  void top_level() {
    const Token& t = cur();
    if (t.kind == Tok::Annotation) {
      next();
      return;
    }
    if (t.kind == Tok::Word && t.text == "source_filename") {
      next();
      expect_punct('=');
      if (!at(Tok::String)) fail("expected string after source_filename");
      out_.module.source_name = next().text;
      return;
    }
    if (t.kind == Tok::Word && t.text == "target") {
      next();
      if (!at_word("datalayout") && !at_word("triple")) fail("expected datalayout or triple");
      next();
      expect_punct('=');
      if (!at(Tok::String)) fail("expected string");
      next();
      return;
    }
    if (t.kind == Tok::Word && t.text == "attributes") {
      warn("attribute group(s)", t.line);
      next();
      if (!at(Tok::AttrRef)) fail("expected attribute group id");
      next();
      expect_punct('=');
      skip_balanced('{', '}');
      return;
    }
    if (t.kind == Tok::MetaId) {
      warn("metadata definition(s)", t.line);
      skip_line();
      return;
    }
    if (t.kind == Tok::LocalId && peek().kind == Tok::Punct && peek().text == "=") {
      struct_definition();
      return;
    }
    if (t.kind == Tok::GlobalId) {
      global_definition();
      return;
    }
    if (t.kind == Tok::Word && t.text == "declare") {
      declaration();
      return;
    }
    if (t.kind == Tok::Word && t.text == "define") {
      function_definition();
      return;
    }
    fail("expected top-level entity, found '" + t.text + "'");
  }

  void struct_definition() {
    const std::string name = next().text;
    expect_punct('=');
    expect_word("type");
    if (accept_word("opaque")) {
      out_.module.types[name] = std::nullopt;
      return;
    }
    if (at_punct('<')) fail("packed struct types are not supported");
    if (!at_punct('{')) fail("expected '{' in struct type definition");
    Type body = parse_type();
    out_.module.types[name] = body.elems;
  }

  void global_definition() {
    const Token& name_tok = next();
    expect_punct('=');
    skip_linkage();
    bool external = false;
    if (accept_word("external")) external = true;
    skip_linkage();
    Global g;
    g.name = name_tok.text;
    if (accept_word("constant")) {
      g.is_constant = true;
    } else if (!accept_word("global")) {
      fail("expected 'global' or 'constant'");
    }
    g.type = parse_type();
    if (g.type.is_void()) fail_at(name_tok, "global of void type");
    if (!external) g.initializer = parse_constant(g.type);
    while (accept_punct(',')) {
      if (accept_word("align")) {
        g.align = static_cast<std::uint32_t>(expect_uint());
      } else if (accept_word("section")) {
        if (!at(Tok::String)) fail("expected section name");
        next();
      } else if (at(Tok::MetaId)) {
        warn("metadata attachment(s)", cur().line);
        next();
        if (at(Tok::MetaId)) next();
      } else {
        fail("unexpected global attribute '" + cur().text + "'");
      }
    }
    if (out_.module.find_global(g.name)) fail_at(name_tok, "redefinition of global @" + g.name);
    out_.module.globals.push_back(std::move(g));
  }

  void declaration() {
    const int line = cur().line;
    next();
    skip_linkage();
    skip_param_attrs();
    Declaration d;
    d.return_type = parse_type();
    if (!at(Tok::GlobalId)) fail("expected function name");
    d.name = next().text;
    expect_punct('(');
    if (!at_punct(')')) {
      while (true) {
        if (at(Tok::Ellipsis)) {
          next();
          d.varargs = true;
          break;
        }
        d.params.push_back(parse_type());
        skip_param_attrs();
        if (at(Tok::LocalId)) next();
        if (!accept_punct(',')) break;
      }
    }
    expect_punct(')');
    skip_function_attrs(line);
    out_.module.declarations.push_back(std::move(d));
  }

  void skip_function_attrs(int line) {
    while (!at(Tok::Eof) && cur().line == line && !at_punct('{')) {
      if (at(Tok::AttrRef) || at(Tok::Word)) {
        warn("function attribute(s)", cur().line);
        next();
      } else if (at(Tok::MetaId)) {
        warn("metadata attachment(s)", cur().line);
        next();
      } else {
        fail("unexpected token '" + cur().text + "' in function header");
      }
    }
  }

  // ---- types ----
  Type parse_type() {
    Type base;
    const Token& t = cur();
    if (t.kind == Tok::Word) {
      const std::string& w = t.text;
      if (w == "void") base = Type::void_type();
      else if (w == "i1") base = Type::i1();
      else if (w == "i8") base = Type::i8();
      else if (w == "i32") base = Type::i32();
      else if (w == "i64") base = Type::i64();
      else if (w == "float") base = Type::f32();
      else if (w == "double") base = Type::f64();
      else if (w == "ptr") base = Type::pointer_to(Type::i8());
      else fail("unsupported type '" + w + "'");
      next();
    } else if (at_punct('[')) {
      next();
      const std::uint64_t n = expect_uint();
      expect_word("x");
      Type elem = parse_type();
      expect_punct(']');
      base = Type::array_of(n, std::move(elem));
    } else if (at_punct('{')) {
      next();
      std::vector<Type> fields;
      if (!at_punct('}')) {
        while (true) {
          fields.push_back(parse_type());
          if (!accept_punct(',')) break;
        }
      }
      expect_punct('}');
      base = Type::literal_struct(std::move(fields));
    } else if (at_punct('<')) {
      fail("vector types are not supported");
    } else if (t.kind == Tok::LocalId) {
      base = Type::named_struct(t.text);
      next();
    } else {
      fail(at(Tok::Eof) ? "expected type before end of input" : "expected type, found '" + t.text + "'");
    }
    while (at_punct('*')) {
      if (base.is_void()) fail("pointer to void is not a valid type");
      next();
      base = Type::pointer_to(std::move(base));
    }
    if (at_word("addrspace")) fail("address spaces are not supported");
    return base;
  }

  // ---- values ----
  Value parse_value(const Type& ty) {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::LocalId:
        next();
        return Value::reg(t.text, ty);
      case Tok::GlobalId:
        next();
        return Value::global(t.text, ty);
      case Tok::Int: {
        next();
        if (ty.is_float()) return Value::floating(std::stod(t.text), ty);
        if (!ty.is_integer()) fail_at(t, "integer literal for non-integer type " + to_string(ty));
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data() + (t.text[0] == '+'),
                                       t.text.data() + t.text.size(), v);
        if (ec != std::errc()) {
          // Values such as 18446744073709551615 are printed for i64 -1 by some tools.
          std::uint64_t u = 0;
          auto [p2, ec2] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), u);
          if (ec2 != std::errc()) fail_at(t, "integer literal out of range");
          v = static_cast<std::int64_t>(u);
          (void)p2;
        }
        (void)p;
        return Value::integer(v, ty);
      }
      case Tok::Float: {
        next();
        if (!ty.is_float()) fail_at(t, "floating literal for non-floating type " + to_string(ty));
        double d = 0;
        auto [p, ec] = std::from_chars(t.text.data() + (t.text[0] == '+'),
                                       t.text.data() + t.text.size(), d);
        if (ec != std::errc()) fail_at(t, "malformed floating literal");
        (void)p;
        if (ty.kind == TypeKind::F32) d = static_cast<float>(d);
        return Value::floating(d, ty);
      }
      case Tok::HexFloat: {
        next();
        if (!ty.is_float()) fail_at(t, "hexadecimal literal for non-floating type");
        if (t.text.size() != 16) fail_at(t, "hexadecimal float literal must have 16 digits");
        std::uint64_t bits = 0;
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), bits, 16);
        double d = std::bit_cast<double>(bits);
        if (ty.kind == TypeKind::F32) d = static_cast<float>(d);
        return Value::floating(d, ty);
      }
      case Tok::CString: {
        next();
        Value v;
        v.kind = ValueKind::String;
        v.bytes = t.text;
        v.type = ty;
        return v;
      }
      case Tok::Word: {
        if (t.text == "true" || t.text == "false") {
          if (ty.kind != TypeKind::I1) fail("boolean literal for non-i1 type");
          next();
          return Value::integer(t.text == "true" ? 1 : 0, ty);
        }
        if (t.text == "null") {
          if (!ty.is_pointer()) fail("null for non-pointer type");
          next();
          return Value::null(ty);
        }
        if (t.text == "zeroinitializer") {
          next();
          Value v;
          v.kind = ValueKind::Zero;
          v.type = ty;
          return v;
        }
        if (t.text == "getelementptr") return parse_const_gep(ty);
        fail("unsupported constant '" + t.text + "'");
      }
      case Tok::Punct:
        if (t.text == "[" || t.text == "{") return parse_aggregate(ty);
        break;
      default:
        break;
    }
    fail(at(Tok::Eof) ? "expected value before end of input" : "expected value, found '" + t.text + "'");
  }

  Value parse_aggregate(const Type& ty) {
    const bool is_array = at_punct('[');
    const char close = is_array ? ']' : '}';
    next();
    Value v;
    v.kind = ValueKind::Aggregate;
    v.type = ty;
    if (!at_punct(close)) {
      while (true) {
        Type et = parse_type();
        v.elements.push_back(parse_value(et));
        if (!accept_punct(',')) break;
      }
    }
    expect_punct(close);
    return v;
  }

  Value parse_const_gep(const Type& ty) {
    next();  // getelementptr
    Value v;
    v.kind = ValueKind::ConstGep;
    v.type = ty;
    v.inbounds = accept_word("inbounds");
    expect_punct('(');
    Type first = parse_type();
    Type ptr_type;
    if (accept_punct(',')) {
      v.gep_source = first;
      ptr_type = parse_type();
    } else {
      if (!first.is_pointer()) fail("expected pointer type in getelementptr");
      v.gep_source = first.pointee();
      ptr_type = first;
    }
    if (!at(Tok::GlobalId)) fail("constant getelementptr must be based on a global");
    v.name = next().text;
    while (accept_punct(',')) {
      Type it = parse_type();
      if (!it.is_integer()) fail("getelementptr index must be an integer");
      if (!at(Tok::Int)) fail("constant getelementptr index must be an integer literal");
      v.elements.push_back(parse_value(it));
    }
    expect_punct(')');
    (void)ptr_type;
    return v;
  }

  Value parse_constant(const Type& ty) { return parse_value(ty); }

  // ---- functions ----
  struct FnState {
    unsigned counter = 0;
    std::set<std::string> names;
  };

  void take_number(FnState& st, const Token& t, const std::string& name, bool label) {
    if (is_number(name)) {
      if (std::stoul(name) != st.counter) {
        fail_at(t, std::string(label ? "label" : "instruction") + " expected to be numbered '%" +
                       std::to_string(st.counter) + "'");
      }
      ++st.counter;
    }
  }

  void function_definition() {
    const int header_line = cur().line;
    next();  // define
    skip_linkage();
    skip_param_attrs();
    IrFunction fn;
    fn.return_type = parse_type();
    if (!at(Tok::GlobalId)) fail("expected function name");
    const Token& name_tok = next();
    fn.name = name_tok.text;
    FnState st;
    expect_punct('(');
    if (!at_punct(')')) {
      while (true) {
        if (at(Tok::Ellipsis)) fail("variadic function definitions are not supported");
        Param p;
        p.type = parse_type();
        skip_param_attrs();
        if (at(Tok::LocalId)) {
          const Token& pt = next();
          p.name = pt.text;
          take_number(st, pt, p.name, false);
        } else {
          p.name = std::to_string(st.counter++);
        }
        fn.params.push_back(std::move(p));
        if (!accept_punct(',')) break;
      }
    }
    expect_punct(')');
    skip_function_attrs(header_line);
    // Attributes may also wrap onto the following lines before '{'.
    while (at(Tok::AttrRef) || (at(Tok::Word) && !at_word("define"))) next();
    expect_punct('{');

    bool block_open = false;
    bool terminated = false;
    while (!at_punct('}')) {
      if (at(Tok::Eof)) fail("unterminated function body for @" + fn.name);
      if (at(Tok::Annotation)) {
        next();
        continue;
      }
      if (at(Tok::LabelDef)) {
        const Token& lt = next();
        take_number(st, lt, lt.text, true);
        fn.blocks.push_back({lt.text, {}});
        block_open = true;
        terminated = false;
        continue;
      }
      if (!block_open || terminated) {
        fn.blocks.push_back({std::to_string(st.counter++), {}});
        block_open = true;
        terminated = false;
      }
      Instruction inst = parse_instruction(st);
      terminated = is_terminator(inst.opcode);
      fn.blocks.back().instructions.push_back(std::move(inst));
    }
    next();  // '}'
    if (out_.module.find_function(fn.name)) fail_at(name_tok, "redefinition of function @" + fn.name);
    out_.module.functions.push_back(std::move(fn));
  }

  void parse_trailing(Instruction& inst) {
    while (accept_punct(',')) {
      if (accept_word("align")) {
        inst.align = static_cast<std::uint32_t>(expect_uint());
      } else if (at(Tok::MetaId)) {
        warn("metadata attachment(s)", cur().line);
        next();
        if (at(Tok::MetaId)) {
          next();
        } else if (at_punct('!')) {
          next();
          skip_balanced('{', '}');
        }
      } else {
        fail("unexpected '" + cur().text + "' after instruction");
      }
    }
  }

  void parse_annotation(Instruction& inst) {
    if (!at(Tok::Annotation) || cur().line != inst.line) return;
    std::istringstream in(next().text);
    std::string tag;
    std::uint64_t idx = 0;
    in >> tag >> idx;
    if (!in || idx == 0) return;
    inst.index = static_cast<InstructionIndex>(idx);
    std::string word;
    while (in >> word) out_.markers[inst.index.value()].push_back(word);
  }

  std::vector<std::string> parse_flags(const std::set<std::string, std::less<>>& allowed) {
    std::vector<std::string> flags;
    while (at(Tok::Word) && allowed.count(cur().text)) flags.push_back(next().text);
    return flags;
  }

  std::string local_label() {
    expect_word("label");
    if (!at(Tok::LocalId)) fail("expected block label");
    return next().text;
  }

  Instruction parse_instruction(FnState& st) {
    Instruction inst;
    inst.line = cur().line;
    const Token* result_tok = nullptr;
    if (at(Tok::LocalId) && peek().kind == Tok::Punct && peek().text == "=") {
      result_tok = &next();
      inst.result = result_tok->text;
      next();
    }
    accept_word("tail") || accept_word("musttail") || accept_word("notail");
    if (!at(Tok::Word)) fail("expected instruction opcode");
    const Token& op_tok = next();
    auto op = opcode_from_name(op_tok.text);
    if (!op) fail_at(op_tok, "unknown opcode '" + op_tok.text + "'");
    inst.opcode = *op;

    switch (inst.opcode) {
      case Opcode::Alloca: {
        inst.aux_type = parse_type();
        if (inst.aux_type.is_void()) fail_at(op_tok, "alloca of void");
        inst.type = Type::pointer_to(inst.aux_type);
        if (at_punct(',') && peek().kind == Tok::Word && peek().text != "align") {
          fail("dynamic alloca counts are not supported");
        }
        break;
      }
      case Opcode::Load: {
        if (accept_word("volatile")) inst.flags.push_back("volatile");
        Type first = parse_type();
        Type ptr_type;
        if (accept_punct(',')) {
          inst.aux_type = first;
          ptr_type = parse_type();
        } else {
          if (!first.is_pointer()) fail("expected pointer operand type for load");
          ptr_type = first;
          inst.aux_type = first.pointee();
        }
        if (!ptr_type.is_pointer()) fail("load address must be a pointer");
        inst.operands.push_back(parse_value(ptr_type));
        inst.type = inst.aux_type;
        break;
      }
      case Opcode::Store: {
        if (accept_word("volatile")) inst.flags.push_back("volatile");
        Type vt = parse_type();
        inst.operands.push_back(parse_value(vt));
        expect_punct(',');
        Type pt = parse_type();
        if (!pt.is_pointer()) fail("store address must be a pointer");
        inst.operands.push_back(parse_value(pt));
        break;
      }
      case Opcode::GetElementPtr: {
        if (accept_word("inbounds")) inst.flags.push_back("inbounds");
        Type first = parse_type();
        Type ptr_type;
        if (accept_punct(',')) {
          inst.aux_type = first;
          ptr_type = parse_type();
        } else {
          if (!first.is_pointer()) fail("expected pointer type in getelementptr");
          ptr_type = first;
          inst.aux_type = first.pointee();
        }
        if (!ptr_type.is_pointer()) fail("getelementptr base must be a pointer");
        inst.operands.push_back(parse_value(ptr_type));
        while (accept_punct(',')) {
          if (at_word("align") || at(Tok::MetaId)) {
            --pos_;
            break;
          }
          Type it = parse_type();
          if (!it.is_integer()) fail("getelementptr index must be an integer");
          inst.operands.push_back(parse_value(it));
        }
        inst.type = gep_result_type(inst);
        break;
      }
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul:
      case Opcode::SDiv:
      case Opcode::SRem: {
        static const std::set<std::string, std::less<>> kIntFlags = {"nsw", "nuw", "exact"};
        inst.flags = parse_flags(kIntFlags);
        inst.type = parse_type();
        if (!inst.type.is_integer()) fail_at(op_tok, "integer operation on non-integer type");
        inst.operands.push_back(parse_value(inst.type));
        expect_punct(',');
        inst.operands.push_back(parse_value(inst.type));
        break;
      }
      case Opcode::FAdd:
      case Opcode::FSub:
      case Opcode::FMul:
      case Opcode::FDiv: {
        inst.flags = parse_flags(kFastMathFlags);
        inst.type = parse_type();
        if (!inst.type.is_float()) fail_at(op_tok, "floating operation on non-floating type");
        inst.operands.push_back(parse_value(inst.type));
        expect_punct(',');
        inst.operands.push_back(parse_value(inst.type));
        break;
      }
      case Opcode::FNeg: {
        inst.flags = parse_flags(kFastMathFlags);
        inst.type = parse_type();
        if (!inst.type.is_float()) fail_at(op_tok, "fneg on non-floating type");
        inst.operands.push_back(parse_value(inst.type));
        break;
      }
      case Opcode::ICmp:
      case Opcode::FCmp: {
        if (inst.opcode == Opcode::FCmp) inst.flags = parse_flags(kFastMathFlags);
        const auto& preds = inst.opcode == Opcode::ICmp ? kICmpPreds : kFCmpPreds;
        if (!at(Tok::Word) || !preds.count(cur().text)) fail("expected comparison predicate");
        inst.predicate = next().text;
        Type ot = parse_type();
        inst.operands.push_back(parse_value(ot));
        expect_punct(',');
        inst.operands.push_back(parse_value(ot));
        inst.type = Type::i1();
        break;
      }
      case Opcode::Br: {
        if (at_word("label")) {
          inst.labels.push_back(local_label());
        } else {
          Type ct = parse_type();
          if (ct.kind != TypeKind::I1) fail("branch condition must be i1");
          inst.operands.push_back(parse_value(ct));
          expect_punct(',');
          inst.labels.push_back(local_label());
          expect_punct(',');
          inst.labels.push_back(local_label());
        }
        break;
      }
      case Opcode::Phi: {
        inst.flags = parse_flags(kFastMathFlags);
        inst.type = parse_type();
        while (true) {
          expect_punct('[');
          inst.operands.push_back(parse_value(inst.type));
          expect_punct(',');
          if (!at(Tok::LocalId)) fail("expected incoming block label");
          inst.labels.push_back(next().text);
          expect_punct(']');
          if (!(at_punct(',') && peek().kind == Tok::Punct && peek().text == "[")) break;
          next();
        }
        break;
      }
      case Opcode::Call: {
        inst.flags = parse_flags(kFastMathFlags);
        if (at_word("ccc") || at_word("fastcc")) next();
        skip_param_attrs();
        inst.type = parse_type();
        if (at_punct('(')) {
          CallSignature sig;
          next();
          if (!at_punct(')')) {
            while (true) {
              if (at(Tok::Ellipsis)) {
                next();
                sig.varargs = true;
                break;
              }
              sig.params.push_back(parse_type());
              if (!accept_punct(',')) break;
            }
          }
          expect_punct(')');
          accept_punct('*');
          inst.signature = std::move(sig);
        }
        if (!at(Tok::GlobalId)) fail("only direct calls to named functions are supported");
        inst.callee = next().text;
        expect_punct('(');
        if (!at_punct(')')) {
          while (true) {
            Type at_ = parse_type();
            skip_param_attrs();
            inst.operands.push_back(parse_value(at_));
            if (!accept_punct(',')) break;
          }
        }
        expect_punct(')');
        while (at(Tok::AttrRef)) {
          warn("function attribute(s)", cur().line);
          next();
        }
        break;
      }
      case Opcode::Ret: {
        if (accept_word("void")) break;
        Type rt = parse_type();
        inst.operands.push_back(parse_value(rt));
        break;
      }
      case Opcode::ZExt:
      case Opcode::SExt:
      case Opcode::Trunc:
      case Opcode::FPToSI:
      case Opcode::SIToFP:
      case Opcode::FPExt:
      case Opcode::FPTrunc:
      case Opcode::BitCast: {
        Type from = parse_type();
        inst.operands.push_back(parse_value(from));
        expect_word("to");
        inst.type = parse_type();
        break;
      }
      case Opcode::Select: {
        inst.flags = parse_flags(kFastMathFlags);
        Type ct = parse_type();
        if (ct.kind != TypeKind::I1) fail("select condition must be i1");
        inst.operands.push_back(parse_value(ct));
        expect_punct(',');
        Type a = parse_type();
        inst.operands.push_back(parse_value(a));
        expect_punct(',');
        Type b = parse_type();
        inst.operands.push_back(parse_value(b));
        inst.type = a;
        break;
      }
    }
    parse_trailing(inst);

    const bool produces = !inst.type.is_void() && inst.opcode != Opcode::Store &&
                          inst.opcode != Opcode::Br && inst.opcode != Opcode::Ret;
    if (!produces && inst.result) {
      fail_at(*result_tok, "instruction does not produce a value and cannot be named");
    }
    if (produces) {
      if (inst.result) {
        take_number(st, *result_tok, *inst.result, false);
      } else {
        inst.result = std::to_string(st.counter++);
      }
    }
    parse_annotation(inst);
    return inst;
  }

  Type gep_result_type(const Instruction& inst) {
    Type t = inst.aux_type;
    for (std::size_t i = 2; i < inst.operands.size(); ++i) {
      if (t.kind == TypeKind::Array) {
        t = t.element();
      } else if (t.kind == TypeKind::Struct) {
        const Value& idx = inst.operands[i];
        if (idx.kind != ValueKind::Int) fail("struct index in getelementptr must be constant");
        const std::vector<Type>* fields = &t.elems;
        if (!t.name.empty()) {
          auto it = out_.module.types.find(t.name);
          if (it == out_.module.types.end() || !it->second) fail("getelementptr into undefined struct %" + t.name);
          fields = &*it->second;
        }
        if (idx.int_value < 0 || static_cast<std::size_t>(idx.int_value) >= fields->size()) {
          fail("struct index out of range in getelementptr");
        }
        t = (*fields)[static_cast<std::size_t>(idx.int_value)];
      } else {
        fail("getelementptr indexes into non-aggregate type " + to_string(t));
      }
    }
    return Type::pointer_to(t);
  }

  struct Stripped {
    int count = 0;
    int first_line = 0;
  };

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOutput out_;
  std::map<std::string, Stripped> stripped_;
};

}  // namespace

ParseOutput parse_module_ex(std::string_view text, std::string_view source_name) {
  Parser p(detail::lex(text), source_name);
  return p.run(text);
}

IrModule parse_module(std::string_view text, std::string_view source_name) {
  return parse_module_ex(text, source_name).module;
}

ParseOutput parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_module_ex(ss.str(), path);
}

}  // namespace lcfi::ir
