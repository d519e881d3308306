#include "refsol/bindings.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <set>

namespace refsol {

namespace {

using syntax::Expr;
using syntax::ExprKind;
using syntax::NameRef;
using syntax::Stmt;
using syntax::StmtKind;

constexpr std::array<std::string_view, 155> kBuiltins = {
    "ArithmeticError", "AssertionError", "AttributeError", "BaseException", "BlockingIOError",
    "BrokenPipeError", "BufferError", "BytesWarning", "ChildProcessError",
    "ConnectionAbortedError", "ConnectionError", "ConnectionRefusedError",
    "ConnectionResetError", "DeprecationWarning", "EOFError", "Ellipsis", "EncodingWarning",
    "EnvironmentError", "Exception", "False", "FileExistsError", "FileNotFoundError",
    "FloatingPointError", "FutureWarning", "GeneratorExit", "IOError", "ImportError",
    "ImportWarning", "IndentationError", "IndexError", "InterruptedError", "IsADirectoryError",
    "KeyError", "KeyboardInterrupt", "LookupError", "MemoryError", "ModuleNotFoundError",
    "NameError", "None", "NotADirectoryError", "NotImplemented", "NotImplementedError",
    "OSError", "OverflowError", "PendingDeprecationWarning", "PermissionError",
    "ProcessLookupError", "RecursionError", "ReferenceError", "ResourceWarning",
    "RuntimeError", "RuntimeWarning", "StopAsyncIteration", "StopIteration", "SyntaxError",
    "SyntaxWarning", "SystemError", "SystemExit", "TabError", "TimeoutError", "True",
    "TypeError", "UnboundLocalError", "UnicodeDecodeError", "UnicodeEncodeError",
    "UnicodeError", "UnicodeTranslateError", "UnicodeWarning", "UserWarning", "ValueError",
    "Warning", "ZeroDivisionError", "__build_class__", "__debug__", "__doc__", "__import__",
    "__loader__", "__name__", "__package__", "__spec__", "abs", "aiter", "all", "anext", "any",
    "ascii", "bin", "bool", "breakpoint", "bytearray", "bytes", "callable", "chr",
    "classmethod", "compile", "complex", "copyright", "credits", "delattr", "dict", "dir",
    "divmod", "enumerate", "eval", "exec", "exit", "filter", "float", "format", "frozenset",
    "getattr", "globals", "hasattr", "hash", "help", "hex", "id", "input", "int", "isinstance",
    "issubclass", "iter", "len", "license", "list", "locals", "map", "max", "memoryview", "min",
    "next", "object", "oct", "open", "ord", "pow", "print", "property", "quit", "range", "repr",
    "reversed", "round", "set", "setattr", "slice", "sorted", "staticmethod", "str", "sum",
    "super", "tuple", "type", "vars", "zip"};

enum class ScopeKind { Module, Function, Class, Lambda, Comprehension };

struct Scope;

struct Symbol {
    bool bound = false;
    std::size_t first_offset = SIZE_MAX;
    std::size_t effective_offset = SIZE_MAX;  // where the first binding takes effect
    IdentifierCategory category = IdentifierCategory::Var;
    bool external = false;
    bool pinned = false;
    bool is_param = false;
    const Stmt* definition = nullptr;  // FunctionDef or ClassDef that binds it
    Scope* body_scope = nullptr;       // scope opened by that definition
    Scope* owner = nullptr;
    std::optional<std::size_t> binding;
};

struct Scope {
    ScopeKind kind;
    Scope* parent;
    std::map<std::string, Symbol, std::less<>> symbols;
    std::set<std::string, std::less<>> globals;
    std::set<std::string, std::less<>> nonlocals;

    bool function_like() const {
        return kind == ScopeKind::Function || kind == ScopeKind::Lambda ||
               kind == ScopeKind::Comprehension;
    }
};

enum class RefKind { Name, Attribute, Keyword };

struct Ref {
    RefKind kind = RefKind::Name;
    Scope* scope = nullptr;
    std::string name;
    std::size_t offset = 0;
    bool needs_alias = false;
    bool debug = false;
    bool binds = false;
    const Expr* callee = nullptr;  // Keyword: the called expression
    Scope* callee_scope = nullptr;
};

bool is_dunder(std::string_view name) {
    return name.size() > 4 && name.substr(0, 2) == "__" && name.substr(name.size() - 2) == "__";
}

class Binder {
public:
    BindingTable run(const syntax::Module& module) {
        Scope* top = open(ScopeKind::Module, nullptr);
        module_ = top;
        for (const Stmt& s : module.body) stmt(s, top);
        return resolve_all();
    }

private:
    std::vector<std::unique_ptr<Scope>> scopes_;
    std::vector<Ref> refs_;
    Scope* module_ = nullptr;
    int debug_depth_ = 0;

    Scope* open(ScopeKind kind, Scope* parent) {
        scopes_.push_back(std::make_unique<Scope>(Scope{kind, parent, {}, {}, {}}));
        return scopes_.back().get();
    }

    void ref(Scope* scope, const NameRef& name, RefKind kind = RefKind::Name) {
        Ref r;
        r.kind = kind;
        r.scope = scope;
        r.name = name.id;
        r.offset = name.offset;
        r.debug = debug_depth_ > 0;
        refs_.push_back(std::move(r));
    }

    // Declares `name` as bound in the scope that owns it and records the
    // occurrence.
    Symbol* bind(Scope* scope, const NameRef& name, IdentifierCategory category,
                 std::size_t effective = 0) {
        ref(scope, name);
        refs_.back().binds = true;
        if (scope->nonlocals.count(name.id)) return nullptr;
        Scope* owner = scope->globals.count(name.id) ? module_ : scope;
        Symbol& sym = owner->symbols[name.id];
        sym.owner = owner;
        sym.bound = true;
        if (name.offset < sym.first_offset) {
            sym.first_offset = name.offset;
            sym.category = category;
        }
        sym.effective_offset = std::min(sym.effective_offset, std::max(effective, name.offset));
        return &sym;
    }

    void exprs(const std::vector<syntax::ExprPtr>& list, Scope* scope) {
        for (const auto& e : list) {
            if (e) load(*e, scope);
        }
    }

    void load(const Expr& e, Scope* scope) {
        switch (e.kind) {
            case ExprKind::Name:
                ref(scope, e.name);
                return;
            case ExprKind::Attribute:
                load(*e.children[0], scope);
                ref(scope, e.name, RefKind::Attribute);
                return;
            case ExprKind::Call:
                exprs(e.children, scope);
                for (const auto& kw : e.keywords) {
                    if (kw.name) {
                        Ref r;
                        r.kind = RefKind::Keyword;
                        r.scope = scope;
                        r.name = kw.name->id;
                        r.offset = kw.name->offset;
                        r.debug = debug_depth_ > 0;
                        r.callee = e.children[0].get();
                        r.callee_scope = scope;
                        refs_.push_back(std::move(r));
                    }
                    load(*kw.value, scope);
                }
                return;
            case ExprKind::Lambda:
                lambda(e, scope);
                return;
            case ExprKind::Comprehension:
                comprehension(e, scope);
                return;
            case ExprKind::NamedExpr: {
                Scope* target = scope;
                while (target->kind == ScopeKind::Comprehension) target = target->parent;
                load(*e.children[1], scope);
                bind(target, e.children[0]->name, IdentifierCategory::Var);
                return;
            }
            case ExprKind::FString:
                for (std::size_t i = 0; i < e.children.size(); ++i) {
                    bool debug = std::find(e.debug_fields.begin(), e.debug_fields.end(), i) !=
                                 e.debug_fields.end();
                    debug_depth_ += debug;
                    load(*e.children[i], scope);
                    debug_depth_ -= debug;
                }
                return;
            default:
                exprs(e.children, scope);
                return;
        }
    }

    void store(const Expr& e, Scope* scope, std::size_t effective = 0) {
        switch (e.kind) {
            case ExprKind::Name:
                bind(scope, e.name, IdentifierCategory::Var, effective);
                return;
            case ExprKind::Tuple:
            case ExprKind::List:
            case ExprKind::Starred:
                for (const auto& c : e.children) store(*c, scope, effective);
                return;
            default:
                load(e, scope);
                return;
        }
    }

    void params(const std::vector<syntax::Param>& list, Scope* outer, Scope* inner) {
        for (const auto& p : list) {
            if (p.annotation) load(*p.annotation, outer);
            if (p.default_value) load(*p.default_value, outer);
        }
        for (const auto& p : list) {
            Symbol* sym = bind(inner, p.name, IdentifierCategory::Arg);
            if (sym) sym->is_param = true;
        }
    }

    void lambda(const Expr& e, Scope* scope) {
        Scope* inner = open(ScopeKind::Lambda, scope);
        params(e.params, scope, inner);
        exprs(e.children, inner);
    }

    void comprehension(const Expr& e, Scope* scope) {
        Scope* inner = open(ScopeKind::Comprehension, scope);
        for (std::size_t i = 0; i < e.generators.size(); ++i) {
            const auto& gen = e.generators[i];
            load(*gen.iter, i == 0 ? scope : inner);
            store(*gen.target, inner);
            exprs(gen.conditions, inner);
        }
        exprs(e.children, inner);
    }

    void body(const std::vector<Stmt>& list, Scope* scope) {
        for (const Stmt& s : list) stmt(s, scope);
    }

    void stmt(const Stmt& s, Scope* scope) {
        switch (s.kind) {
            case StmtKind::Expr:
                load(*s.value, scope);
                break;
            case StmtKind::Assign:
            case StmtKind::AugAssign:
            case StmtKind::AnnAssign:
                exprs(s.exprs, scope);
                if (s.value) load(*s.value, scope);
                for (const auto& t : s.targets) store(*t, scope, s.end_offset);
                break;
            case StmtKind::Delete:
                for (const auto& t : s.targets) store(*t, scope);
                break;
            case StmtKind::Return:
            case StmtKind::Raise:
            case StmtKind::Assert:
                exprs(s.exprs, scope);
                break;
            case StmtKind::Global:
            case StmtKind::Nonlocal:
                for (const NameRef& n : s.names) {
                    if (scope->kind != ScopeKind::Module) {
                        (s.kind == StmtKind::Global ? scope->globals : scope->nonlocals).insert(n.id);
                    }
                    ref(scope, n);
                }
                break;
            case StmtKind::Import:
            case StmtKind::ImportFrom:
                for (const auto& alias : s.aliases) {
                    Symbol* sym = bind(scope, alias.bound, IdentifierCategory::Var);
                    bool external = !alias.has_alias && (s.kind == StmtKind::ImportFrom || alias.dotted);
                    if (sym && external) sym->external = true;
                    if (!alias.has_alias && !external) refs_.back().needs_alias = true;
                }
                break;
            case StmtKind::If:
            case StmtKind::While:
                exprs(s.exprs, scope);
                body(s.body, scope);
                body(s.orelse, scope);
                break;
            case StmtKind::For:
                load(*s.value, scope);
                store(*s.targets[0], scope, s.end_offset);
                body(s.body, scope);
                body(s.orelse, scope);
                break;
            case StmtKind::With:
                for (const auto& item : s.items) {
                    load(*item.context, scope);
                    if (item.target) store(*item.target, scope, s.end_offset);
                }
                body(s.body, scope);
                break;
            case StmtKind::Try:
                body(s.body, scope);
                for (const auto& h : s.handlers) {
                    if (h.type) load(*h.type, scope);
                    if (h.name) bind(scope, *h.name, IdentifierCategory::Var);
                    body(h.body, scope);
                }
                body(s.orelse, scope);
                body(s.finalbody, scope);
                break;
            case StmtKind::FunctionDef: {
                exprs(s.decorators, scope);
                if (s.returns) load(*s.returns, scope);
                Scope* inner = open(ScopeKind::Function, scope);
                Symbol* sym = bind(scope, s.name, IdentifierCategory::Func);
                if (sym && !sym->definition) {
                    sym->definition = &s;
                    sym->body_scope = inner;
                }
                params(s.params, scope, inner);
                body(s.body, inner);
                break;
            }
            case StmtKind::ClassDef: {
                exprs(s.decorators, scope);
                exprs(s.bases, scope);
                for (const auto& kw : s.class_keywords) {
                    if (kw.name) ref(scope, *kw.name, RefKind::Attribute);
                    load(*kw.value, scope);
                }
                Scope* inner = open(ScopeKind::Class, scope);
                Symbol* sym = bind(scope, s.name, IdentifierCategory::Class);
                if (sym && !sym->definition) {
                    sym->definition = &s;
                    sym->body_scope = inner;
                }
                body(s.body, inner);
                break;
            }
            case StmtKind::Pass:
            case StmtKind::Break:
            case StmtKind::Continue:
                break;
        }
    }

    // ---- resolution ------------------------------------------------------

    Symbol* module_symbol(std::string_view name, std::size_t offset, bool binds = false) {
        auto it = module_->symbols.find(name);
        if (it == module_->symbols.end() || !it->second.bound) return nullptr;
        // A module-level name shadowing a builtin only takes over from its
        // first binding onwards.
        if (!binds && is_builtin_name(name) && offset < it->second.effective_offset) {
            return nullptr;
        }
        return &it->second;
    }

    Symbol* enclosing(Scope* from, std::string_view name, std::size_t offset) {
        for (Scope* s = from; s != nullptr; s = s->parent) {
            if (s->kind == ScopeKind::Module) return module_symbol(name, offset);
            if (s->kind == ScopeKind::Class) continue;
            if (s->globals.count(name)) return module_symbol(name, offset);
            if (s->nonlocals.count(name)) continue;
            auto it = s->symbols.find(name);
            if (it != s->symbols.end() && it->second.bound) return &it->second;
        }
        return nullptr;
    }

    Symbol* resolve(Scope* scope, std::string_view name, std::size_t offset, bool binds = false) {
        if (scope->kind == ScopeKind::Module || scope->globals.count(name)) {
            return module_symbol(name, offset, binds);
        }
        if (scope->nonlocals.count(name)) return enclosing(scope->parent, name, offset);
        auto it = scope->symbols.find(name);
        if (it != scope->symbols.end() && it->second.bound) return &it->second;
        return enclosing(scope->parent, name, offset);
    }

    // Parameter symbol receiving keyword `name` when calling `callee`.
    Symbol* keyword_target(const Ref& r) {
        if (r.callee->kind != ExprKind::Name) return nullptr;
        Symbol* fn = resolve(r.callee_scope, r.callee->name.id, r.callee->name.offset);
        if (fn == nullptr || fn->definition == nullptr) return nullptr;
        Scope* body = fn->body_scope;
        if (fn->definition->kind == StmtKind::ClassDef) {
            auto init = body->symbols.find("__init__");
            if (init == body->symbols.end() || init->second.body_scope == nullptr) return nullptr;
            body = init->second.body_scope;
        }
        auto param = body->symbols.find(r.name);
        if (param == body->symbols.end() || !param->second.is_param) return nullptr;
        return &param->second;
    }

    BindingTable resolve_all() {
        std::vector<Symbol*> targets(refs_.size(), nullptr);
        std::set<std::string, std::less<>> foreign_keywords;
        for (std::size_t i = 0; i < refs_.size(); ++i) {
            const Ref& r = refs_[i];
            if (r.kind == RefKind::Name) {
                targets[i] = resolve(r.scope, r.name, r.offset, r.binds);
                if (r.debug && targets[i]) targets[i]->pinned = true;
            } else if (r.kind == RefKind::Keyword) {
                targets[i] = keyword_target(r);
                if (!targets[i]) foreign_keywords.insert(r.name);
            }
        }
        // Parameters that share a name with a keyword passed to a callee we
        // cannot see through may be reached by that keyword.
        for (auto& scope : scopes_) {
            for (auto& [name, sym] : scope->symbols) {
                if (sym.is_param && foreign_keywords.count(name)) sym.pinned = true;
            }
        }

        std::vector<std::size_t> order(refs_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return refs_[a].offset < refs_[b].offset; });

        BindingTable table;
        for (std::size_t i : order) {
            const Ref& r = refs_[i];
            Occurrence occ;
            occ.name = r.name;
            occ.offset = r.offset;
            occ.needs_alias = r.needs_alias;
            Symbol* sym = targets[i];
            if (r.kind == RefKind::Attribute) {
                occ.fixed = FixedReason::Attribute;
            } else if (sym == nullptr) {
                occ.fixed = r.kind == RefKind::Keyword ? FixedReason::ExternalKeyword : FixedReason::Builtin;
            } else if (is_dunder(r.name)) {
                occ.fixed = FixedReason::Dunder;
            } else if (sym->owner->kind == ScopeKind::Class) {
                occ.fixed = FixedReason::ClassMember;
            } else if (sym->external) {
                occ.fixed = FixedReason::ExternalImport;
            } else if (sym->pinned) {
                occ.fixed = FixedReason::Pinned;
            } else {
                if (!sym->binding) {
                    sym->binding = table.bindings.size();
                    table.bindings.push_back(Binding{r.name, sym->category, sym->first_offset});
                }
                occ.binding = sym->binding;
            }
            if (!occ.binding) occ.needs_alias = false;
            table.occurrences[occ.offset] = std::move(occ);
        }
        return table;
    }
};

}  // namespace

std::string_view placeholder_stem(IdentifierCategory category) {
    switch (category) {
        case IdentifierCategory::Var: return "VAR";
        case IdentifierCategory::Func: return "FUNC";
        case IdentifierCategory::Class: return "CLASS";
        case IdentifierCategory::Arg: return "ARG";
    }
    return "VAR";
}

std::string_view to_string(FixedReason reason) {
    switch (reason) {
        case FixedReason::None: return "none";
        case FixedReason::Builtin: return "builtin";
        case FixedReason::Attribute: return "attribute";
        case FixedReason::ExternalImport: return "external-import";
        case FixedReason::ExternalKeyword: return "external-keyword";
        case FixedReason::ClassMember: return "class-member";
        case FixedReason::Dunder: return "dunder";
        case FixedReason::Pinned: return "pinned";
    }
    return "?";
}

const Occurrence* BindingTable::at(std::size_t offset) const {
    auto it = occurrences.find(offset);
    return it == occurrences.end() ? nullptr : &it->second;
}

bool is_builtin_name(std::string_view name) {
    return std::binary_search(kBuiltins.begin(), kBuiltins.end(), name);
}

BindingTable analyze_bindings(const syntax::Module& module) { return Binder().run(module); }

BindingTable analyze_bindings(std::string_view source) {
    return analyze_bindings(syntax::parse(source));
}

}  // namespace refsol
