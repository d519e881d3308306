#include "refsol/normalizer.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <set>

namespace refsol {

namespace {

constexpr std::size_t kSynthetic = std::numeric_limits<std::size_t>::max();

Token synthetic(TokenKind kind, std::string text, const Token& near) {
    return Token{kind, std::move(text), near.line, near.column, kSynthetic};
}

bool is_fstring(const Token& t) {
    return t.kind == TokenKind::String && string_prefix(t.text).find('f') != std::string::npos;
}

std::size_t next_significant(const std::vector<Token>& tokens, std::size_t i) {
    while (i < tokens.size() && tokens[i].kind == TokenKind::Comment) ++i;
    return i;
}

std::string indent(int depth) { return std::string(static_cast<std::size_t>(std::max(depth, 0)) * 4, ' '); }

}  // namespace

const std::string* IdentifierMap::original(std::string_view placeholder) const {
    for (const auto& [ph, orig] : entries) {
        if (ph == placeholder) return &orig;
    }
    return nullptr;
}

bool is_placeholder(std::string_view name) {
    for (auto stem : {"VAR", "FUNC", "CLASS", "ARG"}) {
        std::string_view s(stem);
        if (name.size() >= s.size() + 2 && name.substr(0, s.size()) == s) {
            auto digits = name.substr(s.size());
            return std::all_of(digits.begin(), digits.end(),
                               [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
        }
    }
    return false;
}

TokenStream strip_nonsemantic(const TokenStream& stream, const syntax::Module& tree) {
    std::set<std::size_t> dropped;
    for (const auto& bare : tree.bare_strings) dropped.insert(bare.tokens.begin(), bare.tokens.end());

    const auto& in = stream.tokens;
    TokenStream out;
    out.source_hash = stream.source_hash;
    auto& kept = out.tokens;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const Token& t = in[i];
        if (t.kind == TokenKind::Comment || dropped.count(i)) continue;
        if (t.kind == TokenKind::Newline) {
            if (kept.empty() || kept.back().kind == TokenKind::Newline ||
                kept.back().kind == TokenKind::Indent || kept.back().kind == TokenKind::Dedent) {
                continue;
            }
            // `if x: "doc"` lost its only statement on the header line.
            std::size_t next = next_significant(in, i + 1);
            if (kept.back().is_op(":") && (next >= in.size() || in[next].kind != TokenKind::Indent)) {
                kept.push_back(synthetic(TokenKind::Keyword, "pass", t));
            }
        }
        if (t.kind == TokenKind::Dedent && !kept.empty() && kept.back().kind == TokenKind::Indent) {
            kept.push_back(synthetic(TokenKind::Keyword, "pass", t));
            kept.push_back(synthetic(TokenKind::Newline, "\n", t));
        }
        kept.push_back(t);
    }
    return out;
}

AnonymizedStream anonymize(const TokenStream& stream, const BindingTable& bindings) {
    // Anonymizable occurrences carried by each token, in text order.
    auto occurrences_in = [&](const Token& t) {
        std::vector<const Occurrence*> found;
        if (t.offset == kSynthetic) return found;
        if (t.kind == TokenKind::Name) {
            if (const Occurrence* occ = bindings.at(t.offset); occ && occ->anonymizable()) {
                found.push_back(occ);
            }
        } else if (is_fstring(t)) {
            auto it = bindings.occurrences.lower_bound(t.offset);
            for (; it != bindings.occurrences.end() && it->first < t.offset + t.text.size(); ++it) {
                if (it->second.anonymizable()) found.push_back(&it->second);
            }
        }
        return found;
    };

    std::vector<std::size_t> order;  // binding ids by first appearance
    std::vector<int> index(bindings.bindings.size(), 0);
    std::map<IdentifierCategory, int> counts;
    for (const Token& t : stream.tokens) {
        for (const Occurrence* occ : occurrences_in(t)) {
            std::size_t b = *occ->binding;
            if (index[b] != 0) continue;
            index[b] = ++counts[bindings.bindings[b].category];
            order.push_back(b);
        }
    }

    std::vector<std::string> names(bindings.bindings.size());
    for (std::size_t b : order) {
        IdentifierCategory category = bindings.bindings[b].category;
        std::size_t width = std::max<std::size_t>(2, std::to_string(counts[category]).size());
        std::string digits = std::to_string(index[b]);
        names[b] = std::string(placeholder_stem(category)) +
                   std::string(width - digits.size(), '0') + digits;
    }

    AnonymizedStream result;
    result.stream.source_hash = stream.source_hash;
    for (std::size_t b : order) result.map.entries.emplace_back(names[b], bindings.bindings[b].name);

    for (const Token& t : stream.tokens) {
        auto found = occurrences_in(t);
        if (found.empty()) {
            result.stream.tokens.push_back(t);
            continue;
        }
        if (t.kind == TokenKind::Name) {
            const Occurrence& occ = *found.front();
            const std::string& placeholder = names[*occ.binding];
            if (occ.needs_alias) {
                result.stream.tokens.push_back(t);
                result.stream.tokens.push_back(synthetic(TokenKind::Keyword, "as", t));
                result.stream.tokens.push_back(synthetic(TokenKind::Name, placeholder, t));
            } else {
                Token renamed = t;
                renamed.text = placeholder;
                result.stream.tokens.push_back(std::move(renamed));
            }
            continue;
        }
        Token rewritten = t;
        for (auto it = found.rbegin(); it != found.rend(); ++it) {
            const Occurrence& occ = **it;
            rewritten.text.replace(occ.offset - t.offset, occ.name.size(), names[*occ.binding]);
        }
        result.stream.tokens.push_back(std::move(rewritten));
    }
    return result;
}

std::string detokenize(const TokenStream& stream) {
    std::string out;
    std::string line;
    int depth = 0;
    bool continued = false;
    auto flush = [&] {
        if (line.empty()) return;
        out += indent(depth + (continued ? 1 : 0));
        out += line;
        out += '\n';
        line.clear();
    };
    const auto& tokens = stream.tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        switch (t.kind) {
            case TokenKind::Indent:
                ++depth;
                break;
            case TokenKind::Dedent:
                --depth;
                break;
            case TokenKind::EndMarker:
                break;
            case TokenKind::Newline:
                flush();
                continued = false;
                break;
            case TokenKind::Comment: {
                bool standalone = line.empty();
                if (!standalone) line += ' ';
                line += t.text;
                flush();
                if (i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::Newline) {
                    ++i;  // the comment already ended the line
                    continued = false;
                } else if (!standalone) {
                    continued = true;
                }
                break;
            }
            default:
                if (!line.empty()) line += ' ';
                line += t.text;
                break;
        }
    }
    flush();
    return out;
}

namespace {

bool is_closing(const Token& t) { return t.is_op(")") || t.is_op("]") || t.is_op("}"); }
bool is_opening(const Token& t) { return t.is_op("(") || t.is_op("[") || t.is_op("{"); }

bool is_constant_keyword(const Token& t) {
    return t.is_keyword("True") || t.is_keyword("False") || t.is_keyword("None");
}

// Tokens after which `(` or `[` is a call or subscription.
bool ends_operand(const Token& t) {
    return t.kind == TokenKind::Name || t.kind == TokenKind::String || t.kind == TokenKind::Number ||
           is_closing(t) || t.is_op("...") || is_constant_keyword(t);
}

bool can_be_unary(const Token& t) {
    return t.is_op("-") || t.is_op("+") || t.is_op("~") || t.is_op("*") || t.is_op("**") ||
           t.is_op("@");
}

// Canonical layout of a token stream, one logical line at a time.
class Layout {
public:
    std::string run(const std::vector<Token>& tokens) {
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const Token& t = tokens[i];
            switch (t.kind) {
                case TokenKind::Indent:
                    ++depth_;
                    break;
                case TokenKind::Dedent:
                    --depth_;
                    break;
                case TokenKind::EndMarker:
                    break;
                case TokenKind::Newline:
                    end_line();
                    break;
                case TokenKind::Comment:
                    comment(t, i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::Newline);
                    break;
                default:
                    append(t, i + 1 < tokens.size() ? &tokens[i + 1] : nullptr);
                    break;
            }
        }
        end_line();
        std::string out;
        for (const auto& l : lines_) {
            out += l;
            out += '\n';
        }
        return out;
    }

private:
    std::vector<std::string> lines_;
    std::string line_;
    int depth_ = 0;
    bool continued_ = false;
    bool previous_decorator_ = false;
    bool previous_definition_ = false;  // last top-level statement was def/class
    std::vector<Token> logical_;       // tokens of the current logical line
    std::vector<bool> unary_;          // parallel to logical_
    std::vector<char> brackets_;
    std::vector<std::size_t> lambdas_;  // bracket depth of open lambda parameter lists
    bool prev_colon_is_slice_ = false;

    void push_line(std::string text) { lines_.push_back(std::move(text)); }

    void end_line() {
        if (!line_.empty()) push_line(indent(depth_ + (continued_ ? 1 : 0)) + line_);
        line_.clear();
        logical_.clear();
        unary_.clear();
        brackets_.clear();
        lambdas_.clear();
        continued_ = false;
    }

    void comment(const Token& t, bool ends_line) {
        if (line_.empty() && logical_.empty()) {
            push_line(indent(depth_) + t.text);
            return;
        }
        line_ += line_.empty() ? t.text : "  " + t.text;
        push_line(indent(depth_ + (continued_ ? 1 : 0)) + line_);
        line_.clear();
        if (!ends_line) continued_ = true;
    }

    void start_logical_line(const Token& first, const Token* next) {
        bool definition = first.is_keyword("def") || first.is_keyword("class") || first.is_op("@") ||
                          (first.is_keyword("async") && next && next->is_keyword("def"));
        if (depth_ == 0) {
            bool separate = definition ? !previous_decorator_ : previous_definition_;
            if (separate && !lines_.empty() && !lines_.back().empty()) push_line("");
            previous_decorator_ = first.is_op("@");
            previous_definition_ = definition;
        }
    }

    bool in_slice() const { return !brackets_.empty() && brackets_.back() == '['; }
    bool in_lambda_params() const { return !lambdas_.empty() && lambdas_.back() == brackets_.size(); }
    bool in_call_parens() const { return !brackets_.empty() && brackets_.back() == '('; }

    bool space_before(const Token& t) const {
        const Token& prev = logical_.back();
        bool prev_unary = unary_.back();
        if (is_closing(t) || is_opening(prev)) return false;
        if (prev.is_op(",") || prev.is_op(";")) return !t.is_op(",") && !t.is_op(";");
        if (t.is_op(",") || t.is_op(";") || t.is_op(":")) return false;
        if (prev.is_op(":")) return !prev_colon_is_slice_;
        if (t.is_op(".")) return prev.kind == TokenKind::Number ||
                                 (prev.kind == TokenKind::Keyword && !is_constant_keyword(prev));
        if (prev.is_op(".")) return t.kind == TokenKind::Keyword;
        if ((t.is_op("(") || t.is_op("[")) && ends_operand(prev)) return false;
        if (prev_unary) return false;
        if ((t.is_op("=") || prev.is_op("=")) && (in_call_parens() || in_lambda_params())) {
            return false;
        }
        return true;
    }

    bool unary_position() const {
        if (logical_.empty()) return true;
        const Token& prev = logical_.back();
        if (prev.kind == TokenKind::Operator) return !is_closing(prev) && !prev.is_op("...");
        if (prev.kind == TokenKind::Keyword) return !is_constant_keyword(prev);
        return false;
    }

    void append(const Token& t, const Token* next) {
        if (logical_.empty()) start_logical_line(t, next);
        bool unary = can_be_unary(t) && unary_position();
        bool lambda_colon = false;
        if (t.is_op(":")) {
            lambda_colon = in_lambda_params();
            if (lambda_colon) lambdas_.pop_back();
        }
        if (!logical_.empty() && !line_.empty() && space_before(t)) line_ += ' ';
        line_ += t.text;
        if (t.is_op(":")) prev_colon_is_slice_ = !lambda_colon && in_slice();
        if (t.is_keyword("lambda")) lambdas_.push_back(brackets_.size());
        if (is_opening(t)) brackets_.push_back(t.text[0]);
        if (is_closing(t) && !brackets_.empty()) brackets_.pop_back();
        logical_.push_back(t);
        unary_.push_back(unary);
    }
};

TokenStream tokenize_or_outlier(std::string_view text) {
    try {
        return tokenize(text);
    } catch (const LexError& e) {
        throw OutlierError(std::string("lex error: ") + e.what());
    }
}

syntax::Module parse_or_outlier(const TokenStream& stream) {
    try {
        return syntax::parse(stream);
    } catch (const syntax::ParseError& e) {
        throw OutlierError(std::string("parse error: ") + e.what());
    }
}

// `import m as m` is how anonymization's inserted alias reads once the
// original name is back; drop the redundant alias.
void collapse_self_aliases(std::vector<Token>& tokens) {
    std::vector<Token> out;
    out.reserve(tokens.size());
    bool in_import = false;  // inside `import ...`, not `from ... import ...`
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.is_keyword("import")) {
            in_import = i == 0 || is_layout(tokens[i - 1].kind) || tokens[i - 1].is_op(";") ||
                        tokens[i - 1].is_op(":");
        } else if (t.kind == TokenKind::Newline || t.is_op(";")) {
            in_import = false;
        }
        out.push_back(t);
        if (in_import && t.kind == TokenKind::Name && i + 2 < tokens.size() &&
            (tokens[i - 1].is_keyword("import") || tokens[i - 1].is_op(",")) &&
            tokens[i + 1].is_keyword("as") && tokens[i + 2].kind == TokenKind::Name &&
            tokens[i + 2].text == t.text) {
            i += 2;
        }
    }
    tokens = std::move(out);
}

}  // namespace

std::string format(std::string_view text) {
    TokenStream stream = tokenize(text);
    return Layout().run(stream.tokens);
}

NormalizedProgram normalize(std::string_view source, std::string submission_id) {
    TokenStream stream = tokenize_or_outlier(source);
    syntax::Module tree = parse_or_outlier(stream);
    BindingTable bindings = analyze_bindings(tree);
    AnonymizedStream anonymized = anonymize(strip_nonsemantic(stream, tree), bindings);

    NormalizedProgram program;
    program.submission_id = std::move(submission_id);
    program.map = std::move(anonymized.map);
    try {
        program.text = format(detokenize(anonymized.stream));
        syntax::parse(program.text);
    } catch (const std::exception& e) {
        throw OutlierError(std::string("normalized text is invalid: ") + e.what());
    }
    return program;
}

std::string canonical_source(std::string_view source) {
    TokenStream stream = tokenize_or_outlier(source);
    syntax::Module tree = parse_or_outlier(stream);
    return format(detokenize(strip_nonsemantic(stream, tree)));
}

std::string restore_identifiers(std::string_view text, const IdentifierMap& map) {
    TokenStream stream = tokenize(text);
    BindingTable table = analyze_bindings(syntax::parse(stream));

    std::string restored(text);
    for (auto it = table.occurrences.rbegin(); it != table.occurrences.rend(); ++it) {
        const Occurrence& occ = it->second;
        if (occ.fixed == FixedReason::Attribute) continue;
        if (const std::string* original = map.original(occ.name)) {
            restored.replace(occ.offset, occ.name.size(), *original);
        } else if (is_placeholder(occ.name)) {
            throw UnmappedPlaceholder(occ.name);
        }
    }
    TokenStream out = tokenize(restored);
    collapse_self_aliases(out.tokens);
    return format(detokenize(out));
}

}  // namespace refsol
