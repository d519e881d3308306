#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace refsol {

enum class TokenKind {
    Name,
    Keyword,
    Number,
    String,
    Operator,
    Newline,
    Indent,
    Dedent,
    Comment,
    EndMarker,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::EndMarker;
    std::string text;
    int line = 1;          // 1-based
    int column = 0;        // 0-based, in bytes
    std::size_t offset = 0;  // byte offset into the originating source

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_op(std::string_view t) const { return is(TokenKind::Operator, t); }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

struct TokenStream {
    std::vector<Token> tokens;
    std::uint64_t source_hash = 0;
};

/// Thrown when source text cannot be split into tokens.
class LexError : public std::runtime_error {
public:
    LexError(int line, int column, const std::string& reason);

    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& reason() const { return reason_; }

private:
    int line_;
    int column_;
    std::string reason_;
};

/// Tokenizes Python 3 source. Blank lines and line continuations produce no
/// tokens; comments are kept as Comment tokens so callers can drop them.
TokenStream tokenize(std::string_view source);

bool is_keyword(std::string_view word);

/// True for lexemes that carry no program text of their own.
inline bool is_layout(TokenKind kind) {
    return kind == TokenKind::Newline || kind == TokenKind::Indent ||
           kind == TokenKind::Dedent || kind == TokenKind::EndMarker;
}

/// (kind, text) sequence with layout tokens compared by kind only and
/// comments dropped. Two sources with equal signatures differ only in
/// whitespace.
std::vector<std::pair<TokenKind, std::string>> signature(const TokenStream& stream);

/// Lowercased string prefix (e.g. "rb", "f"); empty for plain literals.
std::string string_prefix(std::string_view literal);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace refsol
