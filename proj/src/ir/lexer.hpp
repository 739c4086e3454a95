#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lcfi::ir::detail {

enum class Tok {
  LocalId,     // %x (text without sigil)
  GlobalId,    // @x
  Word,        // keywords, type names, identifiers
  LabelDef,    // "name:" at the start of a block
  Int,
  Float,       // decimal float literal
  HexFloat,    // 0x... bit pattern
  String,      // "..." decoded
  CString,     // c"..." decoded
  MetaId,      // !name or !0
  AttrRef,     // #0
  Annotation,  // "; !lcfi_index ..." comment body
  Punct,       // single character: = , ( ) [ ] { } * < > ! :
  Ellipsis,    // ...
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

// Throws ParseError on unterminated strings or stray characters.
std::vector<Token> lex(std::string_view src);

}  // namespace lcfi::ir::detail
