#include "edw/lexer.hpp"

#include <cctype>

namespace edw {

std::string_view describe(Token::Kind kind)
{
    switch (kind) {
    case Token::Kind::Identifier: return "identifier";
    case Token::Kind::Integer: return "integer";
    case Token::Kind::Real: return "number";
    case Token::Kind::String: return "string literal";
    case Token::Kind::LBrace: return "'{'";
    case Token::Kind::RBrace: return "'}'";
    case Token::Kind::LParen: return "'('";
    case Token::Kind::RParen: return "')'";
    case Token::Kind::Less: return "'<'";
    case Token::Kind::Greater: return "'>'";
    case Token::Kind::Comma: return "','";
    case Token::Kind::Semicolon: return "';'";
    case Token::Kind::Colon: return "':'";
    case Token::Kind::DoubleColon: return "'::'";
    case Token::Kind::Dot: return "'.'";
    case Token::Kind::Equal: return "'='";
    case Token::Kind::Assign: return "':='";
    case Token::Kind::NotEqual: return "'!='";
    case Token::Kind::LessEqual: return "'<='";
    case Token::Kind::GreaterEqual: return "'>='";
    case Token::Kind::Contains: return "'contains'";
    case Token::Kind::And: return "'and'";
    case Token::Kind::End: return "end of input";
    }
    return "?";
}

namespace {

struct Symbol {
    std::string_view spelling;
    Token::Kind kind;
};

// Longest spellings first so that prefixes do not shadow them.
constexpr Symbol kSymbols[] = {
    {"\xE2\x89\xA0", Token::Kind::NotEqual},     // ≠
    {"\xE2\x89\xA4", Token::Kind::LessEqual},    // ≤
    {"\xE2\x89\xA5", Token::Kind::GreaterEqual}, // ≥
    {"\xE2\x88\x8B", Token::Kind::Contains},     // ∋
    {"\xE2\x88\xA7", Token::Kind::And},          // ∧
    {"::", Token::Kind::DoubleColon},
    {":=", Token::Kind::Assign},
    {"!=", Token::Kind::NotEqual},
    {"<=", Token::Kind::LessEqual},
    {">=", Token::Kind::GreaterEqual},
    {"&&", Token::Kind::And},
    {"{", Token::Kind::LBrace},
    {"}", Token::Kind::RBrace},
    {"(", Token::Kind::LParen},
    {")", Token::Kind::RParen},
    {"<", Token::Kind::Less},
    {">", Token::Kind::Greater},
    {",", Token::Kind::Comma},
    {";", Token::Kind::Semicolon},
    {":", Token::Kind::Colon},
    {".", Token::Kind::Dot},
    {"=", Token::Kind::Equal},
};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            SourcePos pos{line_, column_};
            if (at_ >= text_.size()) {
                out.push_back({Token::Kind::End, "", pos});
                return out;
            }
            out.push_back(lex_one(pos));
        }
    }

private:
    std::string_view text_;
    std::size_t at_ = 0;
    int line_ = 1;
    int column_ = 1;

    void advance(std::size_t bytes)
    {
        for (std::size_t i = 0; i < bytes && at_ < text_.size(); ++i, ++at_) {
            unsigned char c = static_cast<unsigned char>(text_[at_]);
            if (c == '\n') {
                ++line_;
                column_ = 1;
            } else if ((c & 0xC0) != 0x80) {
                ++column_; // count code points, not continuation bytes
            }
        }
    }

    void skip_space()
    {
        while (at_ < text_.size()) {
            unsigned char c = static_cast<unsigned char>(text_[at_]);
            if (std::isspace(c)) {
                advance(1);
            } else if (text_.substr(at_, 2) == "//") {
                while (at_ < text_.size() && text_[at_] != '\n')
                    advance(1);
            } else {
                break;
            }
        }
    }

    Symbol const *match_symbol() const
    {
        for (auto const &s : kSymbols)
            if (text_.substr(at_, s.spelling.size()) == s.spelling)
                return &s;
        return nullptr;
    }

    [[noreturn]] void fail(SourcePos pos, std::string const &msg) const { throw Error(ErrorKind::SyntaxError, msg, pos); }

    Token lex_one(SourcePos pos)
    {
        unsigned char c = static_cast<unsigned char>(text_[at_]);
        if (auto const *sym = match_symbol()) {
            advance(sym->spelling.size());
            return {sym->kind, std::string(sym->spelling), pos};
        }
        if (c == '"')
            return lex_string(pos);
        if (std::isdigit(c) || (c == '-' && at_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[at_ + 1]))))
            return lex_number(pos);
        if (is_ident_start(c)) {
            std::size_t start = at_;
            while (at_ < text_.size() && is_ident_char(static_cast<unsigned char>(text_[at_])) && !match_symbol())
                advance(1);
            return {Token::Kind::Identifier, std::string(text_.substr(start, at_ - start)), pos};
        }
        fail(pos, std::string("unexpected character '") + static_cast<char>(c) + "'");
    }

    Token lex_string(SourcePos pos)
    {
        advance(1);
        std::string value;
        while (true) {
            if (at_ >= text_.size() || text_[at_] == '\n')
                fail(pos, "unterminated string literal");
            char c = text_[at_];
            if (c == '"') {
                advance(1);
                break;
            }
            if (c == '\\') {
                if (at_ + 1 >= text_.size())
                    fail(pos, "unterminated escape");
                char e = text_[at_ + 1];
                if (e != '"' && e != '\\')
                    fail({line_, column_}, std::string("unknown escape '\\") + e + "'");
                value += e;
                advance(2);
                continue;
            }
            value += c;
            advance(1);
        }
        return {Token::Kind::String, value, pos};
    }

    Token lex_number(SourcePos pos)
    {
        std::size_t start = at_;
        if (text_[at_] == '-')
            advance(1);
        while (at_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[at_])))
            advance(1);
        bool real = false;
        if (at_ + 1 < text_.size() && text_[at_] == '.' && std::isdigit(static_cast<unsigned char>(text_[at_ + 1]))) {
            real = true;
            advance(1);
            while (at_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[at_])))
                advance(1);
        }
        if (at_ < text_.size() && (text_[at_] == 'e' || text_[at_] == 'E')) {
            std::size_t digits = at_ + 1;
            if (digits < text_.size() && (text_[digits] == '+' || text_[digits] == '-'))
                ++digits;
            if (digits < text_.size() && std::isdigit(static_cast<unsigned char>(text_[digits]))) {
                real = true;
                advance(digits - at_);
                while (at_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[at_])))
                    advance(1);
            }
        }
        return {real ? Token::Kind::Real : Token::Kind::Integer, std::string(text_.substr(start, at_ - start)), pos};
    }
};

} // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens))
{
    if (tokens_.empty() || !tokens_.back().is(Token::Kind::End))
        tokens_.push_back({Token::Kind::End, "", {}});
}

Token const &TokenStream::peek(std::size_t ahead) const
{
    std::size_t i = at_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
}

Token const &TokenStream::next()
{
    Token const &t = peek();
    if (at_ + 1 < tokens_.size())
        ++at_;
    return t;
}

bool TokenStream::accept(Token::Kind kind)
{
    if (!peek().is(kind))
        return false;
    next();
    return true;
}

bool TokenStream::accept_word(std::string_view word)
{
    if (!peek().is_word(word))
        return false;
    next();
    return true;
}

Token const &TokenStream::expect(Token::Kind kind, std::string_view expected)
{
    if (!peek().is(kind))
        fail(expected);
    return next();
}

Token const &TokenStream::expect_word(std::string_view word)
{
    if (!peek().is_word(word))
        fail("'" + std::string(word) + "'");
    return next();
}

Token const &TokenStream::expect_identifier(std::string_view expected)
{
    return expect(Token::Kind::Identifier, expected);
}

void TokenStream::fail(std::string_view expected) const { fail_at(peek(), expected); }

void TokenStream::fail_at(Token const &token, std::string_view expected) const
{
    std::string found = token.is(Token::Kind::End) ? std::string("end of input") : "'" + token.text + "'";
    throw Error(ErrorKind::SyntaxError, "expected " + std::string(expected) + ", found " + found, token.pos);
}

std::string quote_string(std::string_view text)
{
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace edw
