#include "refsol/syntax.hpp"

#include <algorithm>

namespace refsol::syntax {

ParseError::ParseError(int line, int column, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + reason),
      line_(line),
      column_(column) {}

namespace {

constexpr std::string_view kAugOps[] = {"+=", "-=", "*=", "/=", "//=", "%=", "@=",
                                        "&=", "|=", "^=", ">>=", "<<=", "**="};
constexpr std::string_view kCompareOps[] = {"<", ">", "==", ">=", "<=", "!="};

ExprPtr make(ExprKind kind) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    return e;
}

ExprPtr other(std::vector<ExprPtr> children) {
    auto e = make(ExprKind::Other);
    e->children = std::move(children);
    return e;
}

class Parser {
public:
    // `bias` is added to token offsets when recording names; nested parsers
    // for f-string fields use it to report offsets in the enclosing source.
    Parser(const std::vector<Token>& tokens, std::size_t bias, Module* module)
        : tokens_(tokens), bias_(bias), module_(module) {
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            if (tokens_[i].kind != TokenKind::Comment) index_.push_back(i);
        }
    }

    std::vector<Stmt> file() {
        std::vector<Stmt> body;
        while (!at(TokenKind::EndMarker)) {
            if (at(TokenKind::Newline)) {
                advance();
                continue;
            }
            statement(body);
        }
        return body;
    }

    ExprPtr single_expression() {
        auto e = testlist_star();
        if (!at(TokenKind::Newline) && !at(TokenKind::EndMarker)) fail("unexpected token in expression");
        return e;
    }

private:
    const std::vector<Token>& tokens_;
    std::size_t bias_;
    Module* module_;
    std::vector<std::size_t> index_;
    std::size_t pos_ = 0;

    const Token& cur() const { return tokens_[index_[std::min(pos_, index_.size() - 1)]]; }
    const Token& ahead(std::size_t n) const {
        return tokens_[index_[std::min(pos_ + n, index_.size() - 1)]];
    }
    bool at(TokenKind kind) const { return cur().kind == kind; }
    bool at_op(std::string_view op) const { return cur().is_op(op); }
    bool at_kw(std::string_view kw) const { return cur().is_keyword(kw); }
    const Token& advance() {
        const Token& t = cur();
        if (pos_ < index_.size() - 1) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& reason) const {
        const Token& t = cur();
        std::string what = t.text.empty() ? std::string(to_string(t.kind)) : "'" + t.text + "'";
        throw ParseError(t.line, t.column, reason + " near " + what);
    }

    bool accept_op(std::string_view op) {
        if (!at_op(op)) return false;
        advance();
        return true;
    }
    bool accept_kw(std::string_view kw) {
        if (!at_kw(kw)) return false;
        advance();
        return true;
    }
    void expect_op(std::string_view op) {
        if (!accept_op(op)) fail("expected '" + std::string(op) + "'");
    }
    void expect_kw(std::string_view kw) {
        if (!accept_kw(kw)) fail("expected '" + std::string(kw) + "'");
    }
    NameRef expect_name() {
        if (!at(TokenKind::Name)) fail("expected identifier");
        const Token& t = advance();
        return NameRef{t.text, t.offset + bias_};
    }

    // ---- statements -------------------------------------------------------

    void statement(std::vector<Stmt>& out) {
        if (at_kw("if") || at_kw("while") || at_kw("for") || at_kw("try") || at_kw("with") ||
            at_kw("def") || at_kw("class") || at_op("@") ||
            (at_kw("async") && (ahead(1).is_keyword("def") || ahead(1).is_keyword("for") ||
                                ahead(1).is_keyword("with")))) {
            out.push_back(compound());
            return;
        }
        simple_line(out);
    }

    void simple_line(std::vector<Stmt>& out) {
        struct Span {
            std::size_t begin, end;
            bool bare;
        };
        std::vector<Span> spans;
        while (true) {
            std::size_t begin = pos_;
            Stmt s = small_statement();
            bool bare = s.kind == StmtKind::Expr && is_bare_string(begin, pos_);
            spans.push_back({begin, pos_, bare});
            out.push_back(std::move(s));
            if (!accept_op(";")) break;
            if (at(TokenKind::Newline) || at(TokenKind::EndMarker)) break;
        }
        if (!at(TokenKind::Newline)) fail("expected end of statement");
        advance();
        if (module_ == nullptr) return;
        for (const Span& span : spans) {
            if (!span.bare) continue;
            BareString bs;
            for (std::size_t i = span.begin; i < span.end; ++i) bs.tokens.push_back(index_[i]);
            if (tokens_[index_[span.end]].is_op(";")) {
                bs.tokens.push_back(index_[span.end]);
            } else if (span.begin > 0 && tokens_[index_[span.begin - 1]].is_op(";")) {
                bs.tokens.push_back(index_[span.begin - 1]);
            }
            module_->bare_strings.push_back(std::move(bs));
        }
    }

    bool is_bare_string(std::size_t begin, std::size_t end) const {
        if (begin == end) return false;
        for (std::size_t i = begin; i < end; ++i) {
            const Token& t = tokens_[index_[i]];
            if (t.kind != TokenKind::String) return false;
            if (string_prefix(t.text).find('f') != std::string::npos) return false;
        }
        return true;
    }

    Stmt small_statement() {
        Stmt s;
        s.line = cur().line;
        if (accept_kw("pass")) {
            s.kind = StmtKind::Pass;
        } else if (accept_kw("break")) {
            s.kind = StmtKind::Break;
        } else if (accept_kw("continue")) {
            s.kind = StmtKind::Continue;
        } else if (accept_kw("return")) {
            s.kind = StmtKind::Return;
            if (can_start_expr()) s.exprs.push_back(testlist_star());
        } else if (accept_kw("raise")) {
            s.kind = StmtKind::Raise;
            if (can_start_expr()) {
                s.exprs.push_back(test());
                if (accept_kw("from")) s.exprs.push_back(test());
            }
        } else if (at_kw("global") || at_kw("nonlocal")) {
            s.kind = at_kw("global") ? StmtKind::Global : StmtKind::Nonlocal;
            advance();
            do {
                s.names.push_back(expect_name());
            } while (accept_op(","));
        } else if (accept_kw("del")) {
            s.kind = StmtKind::Delete;
            s.targets.push_back(exprlist());
        } else if (accept_kw("assert")) {
            s.kind = StmtKind::Assert;
            s.exprs.push_back(test());
            if (accept_op(",")) s.exprs.push_back(test());
        } else if (at_kw("import")) {
            import_name(s);
        } else if (at_kw("from")) {
            import_from(s);
        } else {
            expr_statement(s);
        }
        s.end_offset = cur().offset + bias_;
        return s;
    }

    std::string dotted_name(std::vector<NameRef>* parts = nullptr) {
        NameRef first = expect_name();
        std::string dotted = first.id;
        if (parts) parts->push_back(first);
        while (accept_op(".")) {
            NameRef next = expect_name();
            dotted += "." + next.id;
            if (parts) parts->push_back(next);
        }
        return dotted;
    }

    void import_name(Stmt& s) {
        s.kind = StmtKind::Import;
        expect_kw("import");
        do {
            std::vector<NameRef> parts;
            ImportAlias alias;
            alias.module = dotted_name(&parts);
            alias.dotted = parts.size() > 1;
            if (accept_kw("as")) {
                alias.bound = expect_name();
                alias.has_alias = true;
            } else {
                alias.bound = parts.front();
            }
            s.aliases.push_back(std::move(alias));
        } while (accept_op(","));
    }

    void import_from(Stmt& s) {
        s.kind = StmtKind::ImportFrom;
        expect_kw("from");
        bool relative = false;
        while (at_op(".") || at_op("...")) {
            advance();
            relative = true;
        }
        if (!at_kw("import")) dotted_name();
        else if (!relative) fail("expected module name");
        expect_kw("import");
        if (accept_op("*")) {
            s.star_import = true;
            return;
        }
        bool paren = accept_op("(");
        do {
            if (paren && at_op(")")) break;
            ImportAlias alias;
            NameRef member = expect_name();
            alias.module = member.id;
            if (accept_kw("as")) {
                alias.bound = expect_name();
                alias.has_alias = true;
            } else {
                alias.bound = member;
            }
            s.aliases.push_back(std::move(alias));
        } while (accept_op(","));
        if (paren) expect_op(")");
    }

    bool at_aug_op() const {
        return std::any_of(std::begin(kAugOps), std::end(kAugOps),
                           [&](std::string_view op) { return at_op(op); });
    }

    void expr_statement(Stmt& s) {
        ExprPtr first = testlist_star();
        if (accept_op(":")) {
            s.kind = StmtKind::AnnAssign;
            s.targets.push_back(std::move(first));
            s.exprs.push_back(test());
            if (accept_op("=")) s.value = yield_or_testlist();
            return;
        }
        if (at_aug_op()) {
            advance();
            s.kind = StmtKind::AugAssign;
            s.targets.push_back(std::move(first));
            s.value = yield_or_testlist();
            return;
        }
        if (at_op("=")) {
            s.kind = StmtKind::Assign;
            std::vector<ExprPtr> chain;
            chain.push_back(std::move(first));
            while (accept_op("=")) chain.push_back(yield_or_testlist());
            s.value = std::move(chain.back());
            chain.pop_back();
            s.targets = std::move(chain);
            return;
        }
        s.kind = StmtKind::Expr;
        s.value = std::move(first);
    }

    ExprPtr yield_or_testlist() {
        if (at_kw("yield")) return yield_expr();
        return testlist_star();
    }

    ExprPtr yield_expr() {
        expect_kw("yield");
        std::vector<ExprPtr> children;
        if (accept_kw("from")) {
            children.push_back(test());
        } else if (can_start_expr()) {
            children.push_back(testlist_star());
        }
        return other(std::move(children));
    }

    std::vector<Stmt> suite() {
        std::vector<Stmt> body;
        if (!at(TokenKind::Newline)) {
            simple_line(body);
            return body;
        }
        advance();
        if (!at(TokenKind::Indent)) fail("expected an indented block");
        advance();
        while (!at(TokenKind::Dedent) && !at(TokenKind::EndMarker)) {
            if (at(TokenKind::Newline)) {
                advance();
                continue;
            }
            statement(body);
        }
        if (at(TokenKind::Dedent)) advance();
        return body;
    }

    Stmt compound() {
        Stmt s;
        s.line = cur().line;
        if (at_op("@")) {
            std::vector<ExprPtr> decorators;
            while (accept_op("@")) {
                decorators.push_back(named_test());
                if (!at(TokenKind::Newline)) fail("expected newline after decorator");
                advance();
            }
            accept_kw("async");
            if (at_kw("def")) {
                s = function_def();
            } else if (at_kw("class")) {
                s = class_def();
            } else {
                fail("expected function or class definition after decorator");
            }
            s.decorators = std::move(decorators);
            return s;
        }
        if (accept_kw("async")) {
            if (at_kw("def")) return function_def();
            if (at_kw("for")) return for_stmt();
            return with_stmt();
        }
        if (at_kw("if")) return if_stmt();
        if (at_kw("while")) {
            advance();
            s.kind = StmtKind::While;
            s.exprs.push_back(named_test());
            expect_op(":");
            s.body = suite();
            if (accept_kw("else")) {
                expect_op(":");
                s.orelse = suite();
            }
            return s;
        }
        if (at_kw("for")) return for_stmt();
        if (at_kw("try")) return try_stmt();
        if (at_kw("with")) return with_stmt();
        if (at_kw("def")) return function_def();
        return class_def();
    }

    Stmt if_stmt() {
        Stmt s;
        s.line = cur().line;
        advance();  // `if` or `elif`
        s.kind = StmtKind::If;
        s.exprs.push_back(named_test());
        expect_op(":");
        s.body = suite();
        if (at_kw("elif")) {
            s.orelse.push_back(if_stmt());
        } else if (accept_kw("else")) {
            expect_op(":");
            s.orelse = suite();
        }
        return s;
    }

    Stmt for_stmt() {
        Stmt s;
        s.line = cur().line;
        expect_kw("for");
        s.kind = StmtKind::For;
        s.targets.push_back(exprlist());
        expect_kw("in");
        s.value = testlist_star();
        s.end_offset = cur().offset + bias_;
        expect_op(":");
        s.body = suite();
        if (accept_kw("else")) {
            expect_op(":");
            s.orelse = suite();
        }
        return s;
    }

    Stmt try_stmt() {
        Stmt s;
        s.line = cur().line;
        expect_kw("try");
        s.kind = StmtKind::Try;
        expect_op(":");
        s.body = suite();
        while (accept_kw("except")) {
            accept_op("*");
            Handler h;
            if (!at_op(":")) {
                h.type = test();
                if (accept_kw("as")) {
                    h.name = expect_name();
                } else if (accept_op(",")) {
                    fail("multiple exception types must be parenthesized");
                }
            }
            expect_op(":");
            h.body = suite();
            s.handlers.push_back(std::move(h));
        }
        if (accept_kw("else")) {
            expect_op(":");
            s.orelse = suite();
        }
        if (accept_kw("finally")) {
            expect_op(":");
            s.finalbody = suite();
        }
        if (s.handlers.empty() && s.finalbody.empty()) fail("expected 'except' or 'finally' block");
        return s;
    }

    Stmt with_stmt() {
        Stmt s;
        s.line = cur().line;
        expect_kw("with");
        s.kind = StmtKind::With;
        do {
            WithItem item;
            item.context = test();
            if (accept_kw("as")) item.target = target_atom_expr();
            s.items.push_back(std::move(item));
        } while (accept_op(","));
        s.end_offset = cur().offset + bias_;
        expect_op(":");
        s.body = suite();
        return s;
    }

    Stmt function_def() {
        Stmt s;
        s.line = cur().line;
        expect_kw("def");
        s.kind = StmtKind::FunctionDef;
        s.name = expect_name();
        expect_op("(");
        s.params = parameters(")", true);
        expect_op(")");
        if (accept_op("->")) s.returns = test();
        expect_op(":");
        s.body = suite();
        return s;
    }

    Stmt class_def() {
        Stmt s;
        s.line = cur().line;
        expect_kw("class");
        s.kind = StmtKind::ClassDef;
        s.name = expect_name();
        if (accept_op("(")) {
            auto call = make(ExprKind::Call);
            arguments(*call);
            expect_op(")");
            for (auto& arg : call->children) s.bases.push_back(std::move(arg));
            s.class_keywords = std::move(call->keywords);
        }
        expect_op(":");
        s.body = suite();
        return s;
    }

    std::vector<Param> parameters(std::string_view close, bool annotations) {
        std::vector<Param> params;
        while (!at_op(close)) {
            if (accept_op("/")) {
                // positional-only marker
            } else if (accept_op("*") || at_op("**")) {
                bool kwargs = accept_op("**");
                if (at(TokenKind::Name)) {
                    Param p;
                    p.name = expect_name();
                    if (annotations && accept_op(":")) p.annotation = test();
                    params.push_back(std::move(p));
                } else if (kwargs) {
                    fail("expected parameter name after '**'");
                }
            } else {
                Param p;
                p.name = expect_name();
                if (annotations && accept_op(":")) p.annotation = test();
                if (accept_op("=")) p.default_value = test();
                params.push_back(std::move(p));
            }
            if (!accept_op(",")) break;
        }
        return params;
    }

    // ---- expressions ------------------------------------------------------

    bool can_start_expr() const {
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Name:
            case TokenKind::Number:
            case TokenKind::String:
                return true;
            case TokenKind::Keyword:
                return t.text == "lambda" || t.text == "not" || t.text == "await" ||
                       t.text == "None" || t.text == "True" || t.text == "False" ||
                       t.text == "yield";
            case TokenKind::Operator:
                return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" ||
                       t.text == "+" || t.text == "~" || t.text == "*" || t.text == "..." ||
                       t.text == "**";
            default:
                return false;
        }
    }

    // Comma-separated list of `test` / `*expr`, folded into a Tuple when a
    // comma is present.
    ExprPtr testlist_star() {
        ExprPtr first = star_or_named();
        if (!at_op(",")) return first;
        auto tuple = make(ExprKind::Tuple);
        tuple->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (!can_start_expr() || at_op("**")) break;
            tuple->children.push_back(star_or_named());
        }
        return tuple;
    }

    ExprPtr star_or_named() {
        if (accept_op("*")) {
            auto e = make(ExprKind::Starred);
            e->children.push_back(bit_or());
            return e;
        }
        return named_test();
    }

    // Assignment targets of `for` and `del`: expressions without comparisons.
    ExprPtr exprlist() {
        auto one = [this]() -> ExprPtr {
            if (accept_op("*")) {
                auto e = make(ExprKind::Starred);
                e->children.push_back(bit_or());
                return e;
            }
            return bit_or();
        };
        ExprPtr first = one();
        if (!at_op(",")) return first;
        auto tuple = make(ExprKind::Tuple);
        tuple->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_kw("in") || at_op("=") || at(TokenKind::Newline) || at_op(":")) break;
            tuple->children.push_back(one());
        }
        return tuple;
    }

    ExprPtr target_atom_expr() { return bit_or(); }

    ExprPtr named_test() {
        if (at(TokenKind::Name) && ahead(1).is_op(":=")) {
            auto e = make(ExprKind::NamedExpr);
            auto target = make(ExprKind::Name);
            target->name = expect_name();
            advance();
            e->children.push_back(std::move(target));
            e->children.push_back(test());
            return e;
        }
        return test();
    }

    ExprPtr test() {
        if (at_kw("lambda")) return lambda(true);
        ExprPtr body = or_test();
        if (at_kw("if")) {
            advance();
            ExprPtr cond = or_test();
            expect_kw("else");
            ExprPtr alt = test();
            std::vector<ExprPtr> parts;
            parts.push_back(std::move(body));
            parts.push_back(std::move(cond));
            parts.push_back(std::move(alt));
            return other(std::move(parts));
        }
        return body;
    }

    ExprPtr test_nocond() {
        if (at_kw("lambda")) return lambda(false);
        return or_test();
    }

    ExprPtr lambda(bool allow_conditional) {
        expect_kw("lambda");
        auto e = make(ExprKind::Lambda);
        e->params = parameters(":", false);
        expect_op(":");
        e->children.push_back(allow_conditional ? test() : test_nocond());
        return e;
    }

    template <typename Next, typename Pred>
    ExprPtr binary(Next next, Pred is_op) {
        ExprPtr left = (this->*next)();
        if (!is_op()) return left;
        std::vector<ExprPtr> parts;
        parts.push_back(std::move(left));
        while (is_op()) {
            advance();
            parts.push_back((this->*next)());
        }
        return other(std::move(parts));
    }

    ExprPtr or_test() {
        return binary(&Parser::and_test, [this] { return at_kw("or"); });
    }
    ExprPtr and_test() {
        return binary(&Parser::not_test, [this] { return at_kw("and"); });
    }
    ExprPtr not_test() {
        if (accept_kw("not")) {
            std::vector<ExprPtr> parts;
            parts.push_back(not_test());
            return other(std::move(parts));
        }
        return comparison();
    }

    bool at_comparison() const {
        if (at_kw("in") || at_kw("is")) return true;
        if (at_kw("not") && ahead(1).is_keyword("in")) return true;
        return std::any_of(std::begin(kCompareOps), std::end(kCompareOps),
                           [&](std::string_view op) { return at_op(op); });
    }

    ExprPtr comparison() {
        ExprPtr left = bit_or();
        if (!at_comparison()) return left;
        std::vector<ExprPtr> parts;
        parts.push_back(std::move(left));
        while (at_comparison()) {
            if (at_kw("not") || at_kw("is")) {
                bool is = at_kw("is");
                advance();
                if (is) accept_kw("not");
                else advance();  // `in`
            } else {
                advance();
            }
            parts.push_back(bit_or());
        }
        return other(std::move(parts));
    }

    ExprPtr bit_or() {
        return binary(&Parser::bit_xor, [this] { return at_op("|"); });
    }
    ExprPtr bit_xor() {
        return binary(&Parser::bit_and, [this] { return at_op("^"); });
    }
    ExprPtr bit_and() {
        return binary(&Parser::shift, [this] { return at_op("&"); });
    }
    ExprPtr shift() {
        return binary(&Parser::arith, [this] { return at_op("<<") || at_op(">>"); });
    }
    ExprPtr arith() {
        return binary(&Parser::term, [this] { return at_op("+") || at_op("-"); });
    }
    ExprPtr term() {
        return binary(&Parser::factor, [this] {
            return at_op("*") || at_op("/") || at_op("//") || at_op("%") || at_op("@");
        });
    }
    ExprPtr factor() {
        if (at_op("+") || at_op("-") || at_op("~")) {
            advance();
            std::vector<ExprPtr> parts;
            parts.push_back(factor());
            return other(std::move(parts));
        }
        return power();
    }
    ExprPtr power() {
        accept_kw("await");
        ExprPtr base = primary();
        if (!accept_op("**")) return base;
        std::vector<ExprPtr> parts;
        parts.push_back(std::move(base));
        parts.push_back(factor());
        return other(std::move(parts));
    }

    ExprPtr primary() {
        ExprPtr e = atom();
        while (true) {
            if (accept_op("(")) {
                auto call = make(ExprKind::Call);
                call->children.push_back(std::move(e));
                arguments(*call);
                expect_op(")");
                e = std::move(call);
            } else if (accept_op("[")) {
                auto sub = make(ExprKind::Subscript);
                sub->children.push_back(std::move(e));
                subscripts(*sub);
                expect_op("]");
                e = std::move(sub);
            } else if (accept_op(".")) {
                auto attr = make(ExprKind::Attribute);
                attr->children.push_back(std::move(e));
                attr->name = expect_name();
                e = std::move(attr);
            } else {
                return e;
            }
        }
    }

    void arguments(Expr& call) {
        while (!at_op(")")) {
            if (accept_op("*")) {
                auto star = make(ExprKind::Starred);
                star->children.push_back(test());
                call.children.push_back(std::move(star));
            } else if (accept_op("**")) {
                call.keywords.push_back(Keyword{std::nullopt, test()});
            } else if (at(TokenKind::Name) && ahead(1).is_op("=")) {
                NameRef name = expect_name();
                advance();
                call.keywords.push_back(Keyword{name, test()});
            } else {
                ExprPtr arg = named_test();
                if (at_kw("for") || (at_kw("async") && ahead(1).is_keyword("for"))) {
                    arg = comprehension(std::move(arg), nullptr);
                }
                call.children.push_back(std::move(arg));
            }
            if (!accept_op(",")) break;
        }
    }

    void subscripts(Expr& sub) {
        do {
            if (at_op("]")) break;
            std::vector<ExprPtr> parts;
            if (accept_op("*")) {
                auto star = make(ExprKind::Starred);
                star->children.push_back(bit_or());
                sub.children.push_back(std::move(star));
                continue;
            }
            if (!at_op(":")) parts.push_back(named_test());
            if (accept_op(":")) {
                if (!at_op(":") && !at_op("]") && !at_op(",")) parts.push_back(test());
                if (accept_op(":")) {
                    if (!at_op("]") && !at_op(",")) parts.push_back(test());
                }
                sub.children.push_back(other(std::move(parts)));
            } else {
                sub.children.push_back(std::move(parts.front()));
            }
        } while (accept_op(","));
    }

    // Parses the `for ... in ... if ...` clauses following `element`.
    ExprPtr comprehension(ExprPtr element, ExprPtr value) {
        auto comp = make(ExprKind::Comprehension);
        comp->children.push_back(std::move(element));
        if (value) comp->children.push_back(std::move(value));
        while (at_kw("for") || (at_kw("async") && ahead(1).is_keyword("for"))) {
            accept_kw("async");
            expect_kw("for");
            CompFor clause;
            clause.target = exprlist();
            expect_kw("in");
            clause.iter = or_test();
            while (accept_kw("if")) clause.conditions.push_back(test_nocond());
            comp->generators.push_back(std::move(clause));
        }
        return comp;
    }

    bool at_comp_for() const {
        return at_kw("for") || (at_kw("async") && ahead(1).is_keyword("for"));
    }

    ExprPtr atom() {
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Name: {
                auto e = make(ExprKind::Name);
                e->name = expect_name();
                return e;
            }
            case TokenKind::Number:
                advance();
                return make(ExprKind::Other);
            case TokenKind::String:
                return strings();
            case TokenKind::Keyword:
                if (t.text == "None" || t.text == "True" || t.text == "False") {
                    advance();
                    return make(ExprKind::Other);
                }
                if (t.text == "yield") return yield_expr();
                fail("unexpected keyword");
            case TokenKind::Operator:
                if (t.text == "(") return paren();
                if (t.text == "[") return bracket();
                if (t.text == "{") return brace();
                if (t.text == "...") {
                    advance();
                    return make(ExprKind::Other);
                }
                fail("invalid syntax");
            default:
                fail("invalid syntax");
        }
    }

    ExprPtr paren() {
        expect_op("(");
        if (accept_op(")")) return make(ExprKind::Tuple);
        if (at_kw("yield")) {
            ExprPtr y = yield_expr();
            expect_op(")");
            return y;
        }
        ExprPtr first = star_or_named();
        if (at_comp_for()) {
            ExprPtr comp = comprehension(std::move(first), nullptr);
            expect_op(")");
            return comp;
        }
        if (!at_op(",")) {
            expect_op(")");
            return first;
        }
        auto tuple = make(ExprKind::Tuple);
        tuple->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_op(")")) break;
            tuple->children.push_back(star_or_named());
        }
        expect_op(")");
        return tuple;
    }

    ExprPtr bracket() {
        expect_op("[");
        auto list = make(ExprKind::List);
        if (accept_op("]")) return list;
        ExprPtr first = star_or_named();
        if (at_comp_for()) {
            ExprPtr comp = comprehension(std::move(first), nullptr);
            expect_op("]");
            return comp;
        }
        list->children.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_op("]")) break;
            list->children.push_back(star_or_named());
        }
        expect_op("]");
        return list;
    }

    ExprPtr brace() {
        expect_op("{");
        auto e = make(ExprKind::Other);
        if (accept_op("}")) return e;
        bool first = true;
        while (!at_op("}")) {
            if (accept_op("**")) {
                e->children.push_back(bit_or());
            } else {
                ExprPtr key = star_or_named();
                if (accept_op(":")) {
                    ExprPtr value = test();
                    if (first && at_comp_for()) {
                        ExprPtr comp = comprehension(std::move(key), std::move(value));
                        expect_op("}");
                        return comp;
                    }
                    e->children.push_back(std::move(key));
                    e->children.push_back(std::move(value));
                } else {
                    if (first && at_comp_for()) {
                        ExprPtr comp = comprehension(std::move(key), nullptr);
                        expect_op("}");
                        return comp;
                    }
                    e->children.push_back(std::move(key));
                }
            }
            first = false;
            if (!accept_op(",")) break;
        }
        expect_op("}");
        return e;
    }

    // Adjacent string literals; f-strings contribute their interpolations.
    ExprPtr strings() {
        auto e = make(ExprKind::Other);
        bool formatted = false;
        while (at(TokenKind::String)) {
            const Token& t = advance();
            std::string prefix = string_prefix(t.text);
            if (prefix.find('f') == std::string::npos) continue;
            formatted = true;
            std::size_t quote = prefix.size();
            std::size_t qlen = t.text.compare(quote, 3, std::string(3, t.text[quote])) == 0 &&
                                       t.text.size() >= quote + 6
                                   ? 3
                                   : 1;
            std::size_t body_begin = quote + qlen;
            std::size_t body_end = t.text.size() - qlen;
            fstring_fields(t, body_begin, body_end, *e);
        }
        if (formatted) e->kind = ExprKind::FString;
        return e;
    }

    [[noreturn]] void fstring_fail(const Token& t, const std::string& reason) const {
        throw ParseError(t.line, t.column, "f-string: " + reason);
    }

    // Scans replacement fields of an f-string body in [begin, end) of the
    // token text, appending one parsed expression per field.
    void fstring_fields(const Token& t, std::size_t begin, std::size_t end, Expr& out) {
        const std::string& s = t.text;
        std::size_t i = begin;
        while (i < end) {
            char c = s[i];
            if (c == '{') {
                if (i + 1 < end && s[i + 1] == '{') {
                    i += 2;
                    continue;
                }
                i = fstring_field(t, i + 1, end, out);
            } else if (c == '}') {
                if (i + 1 < end && s[i + 1] == '}') {
                    i += 2;
                    continue;
                }
                fstring_fail(t, "single '}' is not allowed");
            } else {
                ++i;
            }
        }
    }

    // Parses one field starting after `{`; returns the index after its `}`.
    std::size_t fstring_field(const Token& t, std::size_t i, std::size_t end, Expr& out) {
        const std::string& s = t.text;
        std::size_t expr_begin = i;
        int depth = 0;
        char quote = 0;
        bool debug = false;
        std::size_t expr_end = std::string::npos;
        for (; i < end; ++i) {
            char c = s[i];
            if (quote) {
                if (c == quote) quote = 0;
                continue;
            }
            if (c == '\'' || c == '"') {
                quote = c;
            } else if (c == '(' || c == '[' || c == '{') {
                ++depth;
            } else if ((c == ')' || c == ']' || c == '}') && depth > 0) {
                --depth;
            } else if (depth == 0) {
                char n = i + 1 < end ? s[i + 1] : '\0';
                if (c == '}' || c == ':') break;
                if (c == '!' && n != '=') break;
                if (c == '=' || c == '!' || c == '<' || c == '>') {
                    if (n == '=') {
                        ++i;
                        continue;
                    }
                    if (c == '=') {
                        std::size_t k = i + 1;
                        while (k < end && s[k] == ' ') ++k;
                        if (k < end && (s[k] == '}' || s[k] == '!' || s[k] == ':')) {
                            debug = true;
                            expr_end = i;
                            i = k;
                            break;
                        }
                    }
                }
            }
        }
        if (i >= end) fstring_fail(t, "expecting '}'");
        if (expr_end == std::string::npos) expr_end = i;
        if (s.find_first_not_of(" \t\r\n", expr_begin) >= expr_end) {
            fstring_fail(t, "empty expression not allowed");
        }
        out.children.push_back(parse_field_expression(t, expr_begin, expr_end));
        if (debug) out.debug_fields.push_back(out.children.size() - 1);
        if (s[i] == '!') {
            i += 2;
            if (i > end) fstring_fail(t, "invalid conversion");
        }
        if (i < end && s[i] == ':') {
            ++i;
            // Format spec: literal text with nested fields, up to the closing brace.
            while (i < end && s[i] != '}') {
                if (s[i] == '{') {
                    i = fstring_field(t, i + 1, end, out);
                } else {
                    ++i;
                }
            }
        }
        if (i >= end || s[i] != '}') fstring_fail(t, "expecting '}'");
        return i + 1;
    }

    ExprPtr parse_field_expression(const Token& t, std::size_t begin, std::size_t end) {
        std::string wrapped = "(" + t.text.substr(begin, end - begin) + ")";
        TokenStream inner;
        try {
            inner = tokenize(wrapped);
        } catch (const LexError& err) {
            fstring_fail(t, err.reason());
        }
        // Inner token offsets count the added '('; the field text starts at
        // t.offset + begin in the enclosing source.
        Parser sub(inner.tokens, bias_ + t.offset + begin - 1, nullptr);
        try {
            return sub.single_expression();
        } catch (const ParseError& err) {
            fstring_fail(t, err.what());
        }
    }
};

}  // namespace

Module parse(const TokenStream& stream) {
    Module module;
    Parser parser(stream.tokens, 0, &module);
    module.body = parser.file();
    return module;
}

Module parse(std::string_view source) { return parse(tokenize(source)); }

}  // namespace refsol::syntax
