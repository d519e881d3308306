#pragma once

#include "refsol/syntax.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refsol {

enum class IdentifierCategory { Var, Func, Class, Arg };

std::string_view placeholder_stem(IdentifierCategory category);

/// Why a name occurrence keeps its original spelling.
enum class FixedReason {
    None,
    Builtin,           // unbound in the program: builtin or star-imported
    Attribute,         // `obj.name`
    ExternalImport,    // `from m import name` or `import a.b`
    ExternalKeyword,   // keyword argument of a callee not defined here
    ClassMember,       // bound in a class body, reachable as an attribute
    Dunder,            // `__name__`-style identifiers
    Pinned,            // renaming would change observable behaviour
};

std::string_view to_string(FixedReason reason);

struct Binding {
    std::string name;
    IdentifierCategory category = IdentifierCategory::Var;
    std::size_t first_offset = 0;
};

struct Occurrence {
    std::string name;
    std::size_t offset = 0;
    /// Index into BindingTable::bindings when the occurrence is anonymizable.
    std::optional<std::size_t> binding;
    FixedReason fixed = FixedReason::None;
    /// `import m` spells the bound name once; anonymizing it needs
    /// `import m as <placeholder>`.
    bool needs_alias = false;

    bool anonymizable() const { return binding.has_value(); }
};

/// Every identifier occurrence of a program keyed by its byte offset, with
/// the anonymizable ones grouped into bindings under lexical scoping.
struct BindingTable {
    std::map<std::size_t, Occurrence> occurrences;
    std::vector<Binding> bindings;

    const Occurrence* at(std::size_t offset) const;
};

/// Resolves name bindings of a parsed module.
BindingTable analyze_bindings(const syntax::Module& module);

/// Parses `source` and resolves its bindings. Throws LexError / ParseError.
BindingTable analyze_bindings(std::string_view source);

bool is_builtin_name(std::string_view name);

}  // namespace refsol
