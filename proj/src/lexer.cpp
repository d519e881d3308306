#include "refsol/token.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace refsol {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async",
    "await", "break",  "class",   "continue", "def",    "del",    "elif",
    "else",  "except", "finally", "for",      "from",   "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",  "or",
    "pass",  "raise",  "return",  "try",      "while",  "with",   "yield",
};

constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 19> kOps2 = {
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", ":="};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:.;=";

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view word) {
    if (word.size() > 2) return false;
    std::string lower;
    for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" ||
           lower == "rb" || lower == "fr" || lower == "rf";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {
        if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
        line_start_ = pos_;
    }

    std::vector<Token> run() {
        while (pos_ < src_.size()) {
            if (at_line_start_) {
                at_line_start_ = false;
                if (parens_.empty() && !continued_) {
                    if (!indentation()) continue;
                }
                continued_ = false;
            }
            scan_token();
        }
        finish();
        return std::move(out_);
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0;
    int line_ = 1;
    bool at_line_start_ = true;
    bool continued_ = false;
    bool line_has_tokens_ = false;
    std::vector<char> parens_;
    std::vector<int> indents_{0};
    std::vector<Token> out_;

    [[noreturn]] void fail(const std::string& reason) const { fail_at(line_, column(), reason); }
    [[noreturn]] static void fail_at(int line, int col, const std::string& reason) {
        throw LexError(line, col, reason);
    }

    int column() const { return static_cast<int>(pos_ - line_start_); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void emit(TokenKind kind, std::size_t begin, std::size_t end, int line, int col) {
        out_.push_back(Token{kind, std::string(src_.substr(begin, end - begin)), line, col, begin});
        if (kind != TokenKind::Comment) line_has_tokens_ = true;
    }

    void new_line(std::size_t after) {
        ++line_;
        line_start_ = after;
        at_line_start_ = true;
    }

    // Length of the newline sequence at pos_, 0 if none.
    std::size_t newline_len() const {
        if (peek() == '\r') return peek(1) == '\n' ? 2 : 1;
        return peek() == '\n' ? 1 : 0;
    }

    // Handles leading whitespace of a logical line. Returns false when the
    // line is blank or comment-only and has been consumed entirely.
    bool indentation() {
        std::size_t begin = pos_;
        int width = 0;
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == ' ') {
                ++width;
            } else if (c == '\t') {
                width = (width / 8 + 1) * 8;
            } else if (c == '\f') {
                width = 0;
            } else {
                break;
            }
            ++pos_;
        }
        if (pos_ >= src_.size()) return false;
        if (peek() == '#') {
            scan_comment();
            skip_blank_newline();
            return false;
        }
        if (std::size_t nl = newline_len(); nl > 0) {
            pos_ += nl;
            new_line(pos_);
            return false;
        }
        if (width > indents_.back()) {
            indents_.push_back(width);
            emit(TokenKind::Indent, begin, pos_, line_, 0);
            line_has_tokens_ = false;
        } else {
            while (width < indents_.back()) {
                indents_.pop_back();
                out_.push_back(Token{TokenKind::Dedent, "", line_, column(), pos_});
            }
            if (width != indents_.back()) fail("unindent does not match any outer indentation level");
        }
        return true;
    }

    void skip_blank_newline() {
        if (std::size_t nl = newline_len(); nl > 0) {
            pos_ += nl;
            new_line(pos_);
        } else {
            at_line_start_ = true;
        }
    }

    void scan_comment() {
        std::size_t begin = pos_;
        int col = column();
        while (pos_ < src_.size() && peek() != '\n' && peek() != '\r') ++pos_;
        emit(TokenKind::Comment, begin, pos_, line_, col);
    }

    void scan_token() {
        char c = peek();
        if (c == ' ' || c == '\t' || c == '\f') {
            ++pos_;
            return;
        }
        if (c == '#') {
            scan_comment();
            return;
        }
        if (c == '\\') {
            ++pos_;
            std::size_t nl = newline_len();
            if (nl == 0) fail("unexpected character after line continuation character");
            pos_ += nl;
            new_line(pos_);
            continued_ = true;
            return;
        }
        if (std::size_t nl = newline_len(); nl > 0) {
            if (parens_.empty() && line_has_tokens_) {
                emit(TokenKind::Newline, pos_, pos_ + nl, line_, column());
            }
            pos_ += nl;
            new_line(pos_);
            if (parens_.empty()) line_has_tokens_ = false;
            else continued_ = true;
            return;
        }
        auto uc = static_cast<unsigned char>(c);
        if (is_ident_start(uc)) {
            scan_word();
            return;
        }
        if (std::isdigit(uc) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            scan_number();
            return;
        }
        if (c == '"' || c == '\'') {
            scan_string(pos_, pos_);
            return;
        }
        scan_operator();
    }

    void scan_word() {
        std::size_t begin = pos_;
        int col = column();
        while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(peek()))) ++pos_;
        std::string_view word = src_.substr(begin, pos_ - begin);
        if ((peek() == '"' || peek() == '\'') && is_string_prefix(word)) {
            scan_string(begin, pos_);
            return;
        }
        emit(is_keyword(word) ? TokenKind::Keyword : TokenKind::Name, begin, pos_, line_, col);
    }

    void digits(bool (*accept)(unsigned char)) {
        while (pos_ < src_.size()) {
            auto c = static_cast<unsigned char>(peek());
            if (accept(c) || (c == '_' && accept(static_cast<unsigned char>(peek(1))))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    void scan_number() {
        std::size_t begin = pos_;
        int col = column();
        auto dec = [](unsigned char c) { return std::isdigit(c) != 0; };
        char next = static_cast<char>(std::tolower(static_cast<unsigned char>(peek(1))));
        if (peek() == '0' && (next == 'x' || next == 'o' || next == 'b')) {
            pos_ += 2;
            std::size_t body = pos_;
            if (next == 'x') digits([](unsigned char c) { return std::isxdigit(c) != 0; });
            if (next == 'o') digits([](unsigned char c) { return c >= '0' && c <= '7'; });
            if (next == 'b') digits([](unsigned char c) { return c == '0' || c == '1'; });
            if (pos_ == body) fail("invalid numeric literal");
        } else {
            digits(dec);
            if (peek() == '.') {
                ++pos_;
                digits(dec);
            }
            char e = peek();
            if (e == 'e' || e == 'E') {
                std::size_t k = 1;
                if (peek(1) == '+' || peek(1) == '-') k = 2;
                if (std::isdigit(static_cast<unsigned char>(peek(k)))) {
                    pos_ += k;
                    digits(dec);
                }
            }
            if (peek() == 'j' || peek() == 'J') ++pos_;
        }
        if (is_ident_char(static_cast<unsigned char>(peek())) && !is_keyword_start()) {
            fail("invalid numeric literal");
        }
        emit(TokenKind::Number, begin, pos_, line_, col);
    }

    // `1if x else 2` is legal: a keyword may follow a number directly.
    bool is_keyword_start() const {
        std::size_t end = pos_;
        while (end < src_.size() && is_ident_char(static_cast<unsigned char>(src_[end]))) ++end;
        return is_keyword(src_.substr(pos_, end - pos_));
    }

    void scan_string(std::size_t begin, std::size_t quote_at) {
        int line = line_;
        int col = static_cast<int>(begin - line_start_);
        pos_ = quote_at;
        char q = peek();
        bool triple = peek(1) == q && peek(2) == q;
        pos_ += triple ? 3 : 1;
        while (true) {
            if (pos_ >= src_.size()) {
                fail_at(line, col, triple ? "unterminated triple-quoted string literal"
                                          : "unterminated string literal");
            }
            char c = peek();
            if (c == '\\') {
                ++pos_;
                if (std::size_t nl = newline_len(); nl > 0) {
                    pos_ += nl;
                    ++line_;
                    line_start_ = pos_;
                } else if (pos_ < src_.size()) {
                    ++pos_;
                }
                continue;
            }
            if (std::size_t nl = newline_len(); nl > 0) {
                if (!triple) fail_at(line, col, "unterminated string literal");
                pos_ += nl;
                ++line_;
                line_start_ = pos_;
                continue;
            }
            if (c == q) {
                if (!triple) {
                    ++pos_;
                    break;
                }
                if (peek(1) == q && peek(2) == q) {
                    pos_ += 3;
                    break;
                }
            }
            ++pos_;
        }
        out_.push_back(Token{TokenKind::String, std::string(src_.substr(begin, pos_ - begin)), line,
                             col, begin});
        line_has_tokens_ = true;
    }

    void scan_operator() {
        std::size_t begin = pos_;
        int col = column();
        std::string_view rest = src_.substr(pos_);
        std::size_t len = 0;
        for (auto op : kOps3) {
            if (rest.substr(0, 3) == op) len = 3;
        }
        if (len == 0) {
            for (auto op : kOps2) {
                if (rest.substr(0, 2) == op) len = 2;
            }
        }
        if (len == 0 && kOps1.find(peek()) != std::string_view::npos) len = 1;
        if (len == 0) fail(std::string("invalid character '") + peek() + "'");
        pos_ += len;
        std::string_view op = src_.substr(begin, len);
        if (op == "(" || op == "[" || op == "{") {
            parens_.push_back(op[0]);
        } else if (op == ")" || op == "]" || op == "}") {
            char open = op == ")" ? '(' : op == "]" ? '[' : '{';
            if (parens_.empty() || parens_.back() != open) {
                fail_at(line_, col, std::string("unmatched '") + std::string(op) + "'");
            }
            parens_.pop_back();
        }
        emit(TokenKind::Operator, begin, pos_, line_, col);
    }

    void finish() {
        if (!parens_.empty()) fail("unexpected EOF in multi-line statement");
        if (continued_) fail("unexpected EOF after line continuation");
        if (line_has_tokens_) {
            out_.push_back(Token{TokenKind::Newline, "", line_, column(), pos_});
        }
        while (indents_.size() > 1) {
            indents_.pop_back();
            out_.push_back(Token{TokenKind::Dedent, "", line_, column(), pos_});
        }
        out_.push_back(Token{TokenKind::EndMarker, "", line_, column(), pos_});
    }
};

}  // namespace

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Name: return "Name";
        case TokenKind::Keyword: return "Keyword";
        case TokenKind::Number: return "Number";
        case TokenKind::String: return "String";
        case TokenKind::Operator: return "Operator";
        case TokenKind::Newline: return "Newline";
        case TokenKind::Indent: return "Indent";
        case TokenKind::Dedent: return "Dedent";
        case TokenKind::Comment: return "Comment";
        case TokenKind::EndMarker: return "EndMarker";
    }
    return "?";
}

LexError::LexError(int line, int column, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + reason),
      line_(line),
      column_(column),
      reason_(reason) {}

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

TokenStream tokenize(std::string_view source) {
    TokenStream stream;
    stream.tokens = Lexer(source).run();
    stream.source_hash = fnv1a(source);
    return stream;
}

std::vector<std::pair<TokenKind, std::string>> signature(const TokenStream& stream) {
    std::vector<std::pair<TokenKind, std::string>> sig;
    sig.reserve(stream.tokens.size());
    for (const auto& t : stream.tokens) {
        if (t.kind == TokenKind::Comment) continue;
        sig.emplace_back(t.kind, is_layout(t.kind) ? std::string() : t.text);
    }
    return sig;
}

std::string string_prefix(std::string_view literal) {
    std::string prefix;
    for (char c : literal) {
        if (c == '"' || c == '\'') break;
        prefix.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return prefix;
}

}  // namespace refsol
