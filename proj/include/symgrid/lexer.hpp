#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "symgrid/error.hpp"

namespace symgrid {

enum class TokenKind {
    Identifier,
    Number,
    ImaginaryNumber,  // numeric literal suffixed by `i`; lexeme excludes the suffix
    String,           // lexeme excludes the quotes
    Operator,         // + - * / ^ = += -= *= /= ^= < <= > >= ->
    Punctuation,      // ( ) [ ] , : @ .
    Keyword,
    Separator,        // `;` or an end of line that closes a statement
    EndOfInput,
};

struct Token {
    TokenKind kind = TokenKind::EndOfInput;
    std::string lexeme;
    SourceLoc loc;

    bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
    bool is_keyword(std::string_view text) const { return is(TokenKind::Keyword, text); }
    bool is_op(std::string_view text) const { return is(TokenKind::Operator, text); }
    bool is_punct(std::string_view text) const { return is(TokenKind::Punctuation, text); }
};

bool is_keyword(std::string_view word);
/// Keywords plus built-in function and constant names: never valid as declared names.
bool is_reserved_name(std::string_view word);

/// Splits UTF-8 model text into tokens. `//` comments produce nothing; newlines
/// inside brackets or after a dangling operator do not end a statement. The
/// returned sequence never contains EndOfInput (callers append their own sentinel).
std::vector<Token> tokenize(std::string_view source);

}  // namespace symgrid
