#include "symgrid/lexer.hpp"

#include <array>
#include <cctype>

#include "symgrid/expr.hpp"

namespace symgrid {

namespace {

constexpr std::array<std::string_view, 26> kKeywords{
    "Header",    "Model",     "Vars",      "Params",  "NLEs",          "WLSEs",  "ECs",
    "Limits",    "Repeats",   "ReInit",    "PreProc", "PostProc",      "IterPostP",
    "BasePostP", "SubModel",  "Distributions", "if",  "else",          "switch", "case",
    "default",   "group",     "end",       "repeat",  "true",          "false",
};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_part(unsigned char c) { return is_ident_start(c) || std::isdigit(c); }

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        while (pos_ < src_.size()) {
            unsigned char c = src_[pos_];
            if (c == '\n') {
                newline();
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                advance();
                continue;
            }
            if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                continue;
            }
            SourceLoc loc{line_, column_};
            if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                number(loc);
            } else if (is_ident_start(c)) {
                identifier(loc);
            } else if (c == '"') {
                string(loc);
            } else {
                symbol(loc);
            }
        }
        return std::move(tokens_);
    }

  private:
    char peek(std::size_t ahead) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

    // Columns count code points, not bytes.
    void advance() {
        unsigned char c = src_[pos_++];
        if ((c & 0xC0) != 0x80) ++column_;
    }

    void newline() {
        SourceLoc loc{line_, column_};
        ++pos_;
        ++line_;
        column_ = 1;
        if (depth_ > 0 || continues_line()) return;
        emit(TokenKind::Separator, "\n", loc);
    }

    bool continues_line() const {
        if (tokens_.empty()) return false;
        const Token& t = tokens_.back();
        if (t.kind == TokenKind::Operator) return true;
        return t.is_punct(",");
    }

    void emit(TokenKind kind, std::string lexeme, SourceLoc loc) {
        tokens_.push_back(Token{kind, std::move(lexeme), loc});
    }

    void number(SourceLoc loc) {
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek(0)))) advance();
        if (peek(0) == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek(0)))) advance();
        } else if (peek(0) == '.' && !is_ident_start(static_cast<unsigned char>(peek(1)))) {
            advance();  // `1.` is a valid literal
        }
        if (peek(0) == 'e' || peek(0) == 'E') {
            std::size_t digits_at = 1;
            if (peek(1) == '+' || peek(1) == '-') digits_at = 2;
            if (std::isdigit(static_cast<unsigned char>(peek(digits_at)))) {
                for (std::size_t k = 0; k < digits_at; ++k) advance();
                while (std::isdigit(static_cast<unsigned char>(peek(0)))) advance();
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        if (peek(0) == 'i' && !is_ident_part(static_cast<unsigned char>(peek(1)))) {
            advance();
            emit(TokenKind::ImaginaryNumber, std::move(text), loc);
            return;
        }
        if (is_ident_part(static_cast<unsigned char>(peek(0))))
            throw LexError(SourceLoc{line_, column_}, "malformed number '" + text + "'");
        emit(TokenKind::Number, std::move(text), loc);
    }

    void identifier(SourceLoc loc) {
        std::size_t start = pos_;
        while (pos_ < src_.size()) {
            auto c = static_cast<unsigned char>(src_[pos_]);
            if (c >= 0x80) {
                utf8_sequence();
                continue;
            }
            if (!is_ident_part(c)) break;
            advance();
        }
        std::string word(src_.substr(start, pos_ - start));
        TokenKind kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
        emit(kind, std::move(word), loc);
    }

    void utf8_sequence() {
        auto lead = static_cast<unsigned char>(src_[pos_]);
        int extra = (lead & 0xE0) == 0xC0 ? 1 : (lead & 0xF0) == 0xE0 ? 2 : (lead & 0xF8) == 0xF0 ? 3 : -1;
        if (extra < 0) throw LexError(SourceLoc{line_, column_}, "invalid UTF-8 byte");
        for (int k = 1; k <= extra; ++k) {
            auto c = static_cast<unsigned char>(peek(static_cast<std::size_t>(k)));
            if ((c & 0xC0) != 0x80) throw LexError(SourceLoc{line_, column_}, "truncated UTF-8 sequence");
        }
        for (int k = 0; k <= extra; ++k) advance();
    }

    void string(SourceLoc loc) {
        advance();
        std::string text;
        while (pos_ < src_.size() && src_[pos_] != '"') {
            if (src_[pos_] == '\n') {
                text += '\n';
                ++pos_;
                ++line_;
                column_ = 1;
                continue;
            }
            text += src_[pos_];
            advance();
        }
        if (pos_ >= src_.size()) throw LexError(loc, "unterminated string literal");
        advance();
        emit(TokenKind::String, std::move(text), loc);
    }

    void symbol(SourceLoc loc) {
        char c = src_[pos_];
        char n = peek(1);
        auto two = [&](std::string op) {
            advance();
            advance();
            emit(TokenKind::Operator, std::move(op), loc);
        };
        switch (c) {
            case '+':
            case '*':
            case '/':
            case '^':
            case '<':
            case '>':
                if (n == '=') return two(std::string{c, '='});
                advance();
                emit(TokenKind::Operator, std::string(1, c), loc);
                return;
            case '-':
                if (n == '=') return two("-=");
                if (n == '>') return two("->");
                advance();
                emit(TokenKind::Operator, "-", loc);
                return;
            case '=':
                advance();
                emit(TokenKind::Operator, "=", loc);
                return;
            case '(':
            case '[':
                ++depth_;
                break;
            case ')':
            case ']':
                if (depth_ > 0) --depth_;
                break;
            case ',':
            case ':':
            case '@':
            case '.':
                break;
            case ';':
                advance();
                emit(TokenKind::Separator, ";", loc);
                return;
            default:
                throw LexError(loc, std::string("illegal character '") + c + "'");
        }
        advance();
        emit(TokenKind::Punctuation, std::string(1, c), loc);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    int depth_ = 0;
    std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
    for (auto k : kKeywords)
        if (k == word) return true;
    return false;
}

bool is_reserved_name(std::string_view word) {
    return is_keyword(word) || is_builtin_function(word) || is_builtin_constant(word);
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace symgrid
