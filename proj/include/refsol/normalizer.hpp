#pragma once

#include "refsol/bindings.hpp"
#include "refsol/syntax.hpp"
#include "refsol/token.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace refsol {

/// Placeholder -> original identifier, in order of first appearance of the
/// placeholder in the normalized text.
struct IdentifierMap {
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string* original(std::string_view placeholder) const;
    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }

    friend bool operator==(const IdentifierMap&, const IdentifierMap&) = default;
    friend auto operator<=>(const IdentifierMap&, const IdentifierMap&) = default;
};

struct NormalizedProgram {
    std::string text;
    IdentifierMap map;
    std::string submission_id;
};

/// A submission that could not be normalized. Callers exclude it from
/// deduplication and count it as an outlier.
class OutlierError : public std::runtime_error {
public:
    explicit OutlierError(const std::string& reason) : std::runtime_error(reason) {}
};

class UnmappedPlaceholder : public std::runtime_error {
public:
    explicit UnmappedPlaceholder(const std::string& placeholder)
        : std::runtime_error("placeholder '" + placeholder + "' is not in the identifier map"),
          placeholder_(placeholder) {}
    const std::string& placeholder() const { return placeholder_; }

private:
    std::string placeholder_;
};

/// Drops comments and expression statements consisting of plain string
/// literals (docstrings, string comments). Blocks left empty get `pass`.
TokenStream strip_nonsemantic(const TokenStream& stream, const syntax::Module& tree);

struct AnonymizedStream {
    TokenStream stream;
    IdentifierMap map;
};

/// Replaces every anonymizable name with its binding's placeholder.
/// Placeholders are numbered per category in order of first appearance.
AnonymizedStream anonymize(const TokenStream& stream, const BindingTable& bindings);

/// One line per logical line, four spaces per indentation level, tokens
/// separated by single spaces.
std::string detokenize(const TokenStream& stream);

/// Canonical whitespace layout of `text`. The token sequence is unchanged
/// and format(format(t)) == format(t). Throws LexError on untokenizable text.
std::string format(std::string_view text);

/// tokenize -> strip_nonsemantic -> anonymize -> detokenize -> format.
/// Throws OutlierError when the source cannot be lexed or parsed.
NormalizedProgram normalize(std::string_view source, std::string submission_id = {});

/// format(detokenize(strip_nonsemantic(tokenize(source)))): the original
/// program with its own identifiers, laid out like normalized text.
std::string canonical_source(std::string_view source);

/// Puts the original identifiers of `map` back into normalized `text`.
/// Throws UnmappedPlaceholder if `text` uses a placeholder missing from `map`.
std::string restore_identifiers(std::string_view text, const IdentifierMap& map);

/// True when `name` has the shape of a generated placeholder (VAR01, ARG003).
bool is_placeholder(std::string_view name);

}  // namespace refsol
