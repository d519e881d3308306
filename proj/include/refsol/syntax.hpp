#pragma once

// Syntax tree for the subset of Python 3 needed to resolve name bindings.
// Nodes keep only what scope analysis needs: identifiers with their source
// offsets, and the nesting of expressions, statements and scopes. Literal
// values and operators are folded into ExprKind::Other.

#include "refsol/token.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace refsol::syntax {

/// An identifier occurrence. `offset` is the byte offset in the parsed
/// source, which also holds for names inside f-string replacement fields.
struct NameRef {
    std::string id;
    std::size_t offset = 0;
};

enum class ExprKind {
    Name,
    Attribute,      // children[0] is the value, name is the attribute
    Subscript,      // children[0] is the value, rest are index parts
    Call,           // children[0] is the callee, rest positional args
    Tuple,
    List,
    Starred,        // *x in a target or call
    Lambda,
    Comprehension,  // children are element exprs (key and value for dicts)
    NamedExpr,      // children[0] := children[1]
    FString,        // children are the interpolated expressions
    Other,          // any other expression; children evaluated in order
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Param {
    NameRef name;
    ExprPtr annotation;
    ExprPtr default_value;
};

/// Keyword argument at a call site; `name` is empty for `**mapping`.
struct Keyword {
    std::optional<NameRef> name;
    ExprPtr value;
};

struct CompFor {
    ExprPtr target;
    ExprPtr iter;
    std::vector<ExprPtr> conditions;
};

struct Expr {
    ExprKind kind = ExprKind::Other;
    NameRef name;
    std::vector<ExprPtr> children;
    std::vector<Keyword> keywords;     // Call
    std::vector<Param> params;         // Lambda
    std::vector<CompFor> generators;   // Comprehension
    std::vector<std::size_t> debug_fields;  // FString: children written as `{expr=}`
};

enum class StmtKind {
    Expr,
    Assign,
    AugAssign,
    AnnAssign,
    Delete,
    Return,
    Raise,
    Assert,
    Pass,
    Break,
    Continue,
    Global,
    Nonlocal,
    Import,
    ImportFrom,
    If,
    While,
    For,
    With,
    Try,
    FunctionDef,
    ClassDef,
};

struct Stmt;

/// One name bound by an import statement.
struct ImportAlias {
    std::string module;          // dotted module path or imported member
    NameRef bound;               // the name the statement binds
    bool has_alias = false;      // written with `as`
    bool dotted = false;         // `import a.b` binds `a`
};

struct Handler {
    ExprPtr type;
    std::optional<NameRef> name;
    std::vector<Stmt> body;
};

struct WithItem {
    ExprPtr context;
    ExprPtr target;
};

struct Stmt {
    StmtKind kind = StmtKind::Pass;
    int line = 0;
    // Offset of the token ending the statement (or a compound header); names
    // bound by assignment take effect there.
    std::size_t end_offset = 0;

    // Assign: every target of `a = b = value`; AugAssign/AnnAssign/For: one
    // target; Delete: deleted expressions.
    std::vector<ExprPtr> targets;
    ExprPtr value;
    // Loaded expressions without a dedicated slot (tests, return values,
    // raise operands, assert operands, annotations).
    std::vector<ExprPtr> exprs;

    std::vector<Stmt> body;
    std::vector<Stmt> orelse;
    std::vector<Stmt> finalbody;
    std::vector<Handler> handlers;
    std::vector<WithItem> items;

    // FunctionDef / ClassDef
    NameRef name;
    std::vector<Param> params;
    std::vector<ExprPtr> decorators;
    ExprPtr returns;
    std::vector<ExprPtr> bases;
    std::vector<Keyword> class_keywords;

    std::vector<NameRef> names;          // Global / Nonlocal
    std::vector<ImportAlias> aliases;    // Import / ImportFrom
    bool star_import = false;
};

/// Token indices (into the full token stream, comments included) of one
/// expression statement made only of string literals, plus the `;` that
/// separated it from a neighbouring statement on the same line, if any.
struct BareString {
    std::vector<std::size_t> tokens;
};

struct Module {
    std::vector<Stmt> body;
    std::vector<BareString> bare_strings;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& reason);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Parses a token stream produced by `tokenize`. Comment tokens are skipped.
Module parse(const TokenStream& stream);

/// Tokenizes and parses `source`.
Module parse(std::string_view source);

}  // namespace refsol::syntax
