#pragma once

#include "edw/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace edw {

// Tokenizer shared by the source-schema (.odl) and warehouse-definition
// (.edw) parsers. Identifiers may contain any non-ASCII UTF-8 sequence except
// the operator symbols listed below; keywords are plain identifiers that the
// parsers recognize by spelling.
struct Token {
    enum class Kind {
        Identifier,
        Integer,
        Real,
        String,
        LBrace, RBrace, LParen, RParen, Less, Greater, Comma, Semicolon, Colon, DoubleColon, Dot,
        Equal, Assign, NotEqual, LessEqual, GreaterEqual, Contains, And,
        End,
    };

    Kind kind = Kind::End;
    std::string text; // identifier spelling, literal contents (unescaped), or operator spelling
    SourcePos pos;

    bool is(Kind k) const { return kind == k; }
    bool is_word(std::string_view word) const { return kind == Kind::Identifier && text == word; }
};

std::string_view describe(Token::Kind kind);

// Throws Error(SyntaxError) on characters that start no token.
std::vector<Token> tokenize(std::string_view text);

// Cursor over a token vector with error helpers.
class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens);

    Token const &peek(std::size_t ahead = 0) const;
    Token const &next();
    bool at_end() const { return peek().is(Token::Kind::End); }

    bool accept(Token::Kind kind);
    bool accept_word(std::string_view word);
    Token const &expect(Token::Kind kind, std::string_view expected);
    Token const &expect_word(std::string_view word);
    Token const &expect_identifier(std::string_view expected);

    [[noreturn]] void fail(std::string_view expected) const;
    [[noreturn]] void fail_at(Token const &token, std::string_view expected) const;

private:
    std::vector<Token> tokens_;
    std::size_t at_ = 0;
};

// Identifier or string spelling suitable for re-lexing.
std::string quote_string(std::string_view text);

} // namespace edw
