#include "lexer.hpp"

#include <cctype>

#include "lcfi/ir/parser.hpp"

namespace lcfi::ir::detail {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$' ||
         c == '-';
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (at_end()) break;
      const int line = line_;
      const int col = col_;
      const char c = peek();
      if (c == ';') {
        std::string body = read_comment();
        auto first = body.find_first_not_of(" \t");
        if (first != std::string::npos && body.compare(first, 11, "!lcfi_index") == 0) {
          out.push_back({Tok::Annotation, body.substr(first), line, col});
        }
        continue;
      }
      if (c == '%' || c == '@') {
        advance();
        std::string name = read_name(line, col);
        out.push_back({c == '%' ? Tok::LocalId : Tok::GlobalId, std::move(name), line, col});
        continue;
      }
      if (c == '!') {
        advance();
        if (!at_end() && (is_ident_char(peek()))) {
          std::string name;
          while (!at_end() && is_ident_char(peek())) name += advance();
          out.push_back({Tok::MetaId, std::move(name), line, col});
        } else {
          out.push_back({Tok::Punct, "!", line, col});
        }
        continue;
      }
      if (c == '#') {
        advance();
        std::string digits;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) digits += advance();
        if (digits.empty()) throw ParseError(line, col, "expected attribute group number after '#'");
        out.push_back({Tok::AttrRef, std::move(digits), line, col});
        continue;
      }
      if (c == '"') {
        std::string s = read_string(line, col);
        if (!at_end() && peek() == ':') {
          advance();
          out.push_back({Tok::LabelDef, std::move(s), line, col});
        } else {
          out.push_back({Tok::String, std::move(s), line, col});
        }
        continue;
      }
      if (c == 'c' && peek(1) == '"') {
        advance();
        out.push_back({Tok::CString, read_string(line, col), line, col});
        continue;
      }
      if (c == '.' && peek(1) == '.' && peek(2) == '.') {
        advance();
        advance();
        advance();
        out.push_back({Tok::Ellipsis, "...", line, col});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        out.push_back(read_number(line, col));
        continue;
      }
      if (is_ident_start(c)) {
        std::string word;
        while (!at_end() && is_ident_char(peek())) word += advance();
        if (!at_end() && peek() == ':') {
          advance();
          out.push_back({Tok::LabelDef, std::move(word), line, col});
        } else {
          out.push_back({Tok::Word, std::move(word), line, col});
        }
        continue;
      }
      static constexpr std::string_view kPunct = "=,()[]{}*<>:";
      if (kPunct.find(c) != std::string_view::npos) {
        advance();
        out.push_back({Tok::Punct, std::string(1, c), line, col});
        continue;
      }
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::Eof, "", line_, col_});
    return out;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  std::string read_comment() {
    advance();  // ';'
    std::string body;
    while (!at_end() && peek() != '\n') body += advance();
    return body;
  }

  std::string read_string(int line, int col) {
    advance();  // opening quote
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') throw ParseError(line, col, "unterminated string literal");
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        const int hi = hex_digit(peek());
        const int lo = hex_digit(peek(1));
        if (hi >= 0 && lo >= 0) {
          advance();
          advance();
          out += static_cast<char>(hi * 16 + lo);
        } else if (peek() == '\\') {
          advance();
          out += '\\';
        } else {
          throw ParseError(line_, col_, "bad escape in string literal");
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  std::string read_name(int line, int col) {
    if (!at_end() && peek() == '"') return read_string(line, col);
    std::string name;
    while (!at_end() && is_ident_char(peek())) name += advance();
    if (name.empty()) throw ParseError(line, col, "expected name after sigil");
    return name;
  }

  Token read_number(int line, int col) {
    std::string text;
    if (peek() == '-' || peek() == '+') text += advance();
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      std::string hex;
      while (!at_end() && hex_digit(peek()) >= 0) hex += advance();
      if (hex.empty()) throw ParseError(line, col, "malformed hexadecimal literal");
      return {Tok::HexFloat, text + hex, line, col};
    }
    bool is_float = false;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
    if (!at_end() && peek() == '.' && peek(1) != '.') {
      is_float = true;
      text += advance();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
    }
    if (!at_end() && (peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '-' || peek(1) == '+') &&
          std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      is_float = true;
      text += advance();
      if (peek() == '-' || peek() == '+') text += advance();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
    }
    if (!is_float && !at_end() && peek() == ':') {
      advance();
      return {Tok::LabelDef, text, line, col};
    }
    return {is_float ? Tok::Float : Tok::Int, text, line, col};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> lex(std::string_view src) { return Lexer(src).run(); }

}  // namespace lcfi::ir::detail
