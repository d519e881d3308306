#include "refsol/bindings.hpp"

#include <doctest.h>

#include <string>

using namespace refsol;

namespace {

// Occurrence of the n-th (0-based) spelling of `name` in `src`.
const Occurrence& occ(const BindingTable& table, const std::string& src, const std::string& name, int n = 0) {
    std::size_t pos = 0;
    for (int i = 0; i <= n; ++i) {
        pos = src.find(name, i == 0 ? 0 : pos + 1);
        // Skip matches inside longer identifiers.
        while (pos != std::string::npos &&
               ((pos > 0 && (std::isalnum(static_cast<unsigned char>(src[pos - 1])) || src[pos - 1] == '_')) ||
                (pos + name.size() < src.size() &&
                 (std::isalnum(static_cast<unsigned char>(src[pos + name.size()])) || src[pos + name.size()] == '_')))) {
            pos = src.find(name, pos + 1);
        }
    }
    REQUIRE(pos != std::string::npos);
    const Occurrence* o = table.at(pos);
    REQUIRE(o != nullptr);
    return *o;
}

}  // namespace

TEST_CASE("x = 1; print(x)") {
    std::string src = "x = 1; print(x)\n";
    auto t = analyze_bindings(src);
    auto& x0 = occ(t, src, "x", 0);
    auto& x1 = occ(t, src, "x", 1);
    REQUIRE(x0.anonymizable());
    CHECK(x0.binding == x1.binding);
    CHECK(t.bindings[*x0.binding].category == IdentifierCategory::Var);
    CHECK(occ(t, src, "print").fixed == FixedReason::Builtin);
}

TEST_CASE("def f(a): return a") {
    std::string src = "def f(a): return a\n";
    auto t = analyze_bindings(src);
    CHECK(t.bindings[*occ(t, src, "f").binding].category == IdentifierCategory::Func);
    auto& a0 = occ(t, src, "a", 0);
    CHECK(t.bindings[*a0.binding].category == IdentifierCategory::Arg);
    CHECK(occ(t, src, "a", 1).binding == a0.binding);
}

TEST_CASE("import math; print(math.pi)") {
    // Matches CPython's symtable: `math` is a bound import, `print` is a
    // global it never binds, `pi` is not a symbol at all.
    std::string src = "import math; print(math.pi)\n";
    auto t = analyze_bindings(src);
    auto& m0 = occ(t, src, "math", 0);
    CHECK(m0.anonymizable());
    CHECK(m0.needs_alias);
    CHECK(occ(t, src, "math", 1).binding == m0.binding);
    CHECK(occ(t, src, "pi").fixed == FixedReason::Attribute);
}

TEST_CASE("scoping rules") {
    SUBCASE("same name in different functions is two bindings") {
        std::string src = "def f():\n    x = 1\n    return x\ndef g():\n    x = 2\n    return x\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "x", 0).binding != occ(t, src, "x", 2).binding);
        CHECK(occ(t, src, "x", 0).binding == occ(t, src, "x", 1).binding);
    }
    SUBCASE("global statement joins the module binding") {
        std::string src = "n = 0\ndef f():\n    global n\n    n = 1\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "n", 0).binding == occ(t, src, "n", 2).binding);
    }
    SUBCASE("nonlocal joins the enclosing function") {
        std::string src = "def f():\n    c = 0\n    def g():\n        nonlocal c\n        c += 1\n    return c\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "c", 0).binding == occ(t, src, "c", 2).binding);
        CHECK(occ(t, src, "c", 3).binding == occ(t, src, "c", 0).binding);
    }
    SUBCASE("class bodies are skipped by nested functions") {
        std::string src = "x = 1\nclass A:\n    x = 2\n    def m(self):\n        return x\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "x", 1).fixed == FixedReason::ClassMember);
        CHECK(occ(t, src, "x", 2).binding == occ(t, src, "x", 0).binding);
    }
    SUBCASE("comprehension variables are local, walrus binds outside") {
        std::string src = "i = 5\nys = [i for i in range(3) if (last := i)]\nprint(i, last)\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "i", 1).binding == occ(t, src, "i", 2).binding);
        CHECK(occ(t, src, "i", 0).binding != occ(t, src, "i", 1).binding);
        CHECK(occ(t, src, "i", 3).binding == occ(t, src, "i", 1).binding);
        CHECK(occ(t, src, "i", 4).binding == occ(t, src, "i", 0).binding);
        CHECK(occ(t, src, "last", 1).binding == occ(t, src, "last", 0).binding);
    }
    SUBCASE("exception and with aliases") {
        std::string src = "try:\n    pass\nexcept E as err:\n    print(err)\nwith open(p) as fh:\n    fh.read()\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "err", 0).binding == occ(t, src, "err", 1).binding);
        CHECK(occ(t, src, "fh", 0).binding == occ(t, src, "fh", 1).binding);
        CHECK(occ(t, src, "E").fixed == FixedReason::Builtin);
    }
}

TEST_CASE("fixed names") {
    SUBCASE("from-imports and dotted imports") {
        std::string src = "from collections import deque\nimport os.path\nprint(deque, os)\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "deque", 1).fixed == FixedReason::ExternalImport);
        CHECK(occ(t, src, "os", 1).fixed == FixedReason::ExternalImport);
    }
    SUBCASE("aliased imports are user bindings") {
        std::string src = "import numpy as np\nfrom math import pi as PI\nprint(np, PI)\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "np", 1).anonymizable());
        CHECK(occ(t, src, "PI", 1).anonymizable());
    }
    SUBCASE("keyword arguments of external callees pin same-named parameters") {
        std::string src = "def f(key):\n    return key\nsorted([], key=f)\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "key", 2).fixed == FixedReason::ExternalKeyword);
        CHECK(occ(t, src, "key", 0).fixed == FixedReason::Pinned);
    }
    SUBCASE("keyword arguments of user classes follow __init__") {
        std::string src = "class P:\n    def __init__(self, w):\n        self.w = w\nP(w=3)\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "w", 3).binding == occ(t, src, "w", 0).binding);
    }
    SUBCASE("dunders and f-string debug fields") {
        std::string src = "if __name__ == '__main__':\n    v = 1\n    print(f'{v=}')\n";
        auto t = analyze_bindings(src);
        CHECK(occ(t, src, "__name__").fixed == FixedReason::Builtin);
        CHECK(occ(t, src, "v", 0).fixed == FixedReason::Pinned);
    }
    SUBCASE("star import makes free names fixed") {
        std::string src = "from math import *\nprint(sqrt(2))\n";
        auto t = analyze_bindings(src);
        CHECK_FALSE(occ(t, src, "sqrt").anonymizable());
    }
}

TEST_CASE("builtins list") {
    CHECK(is_builtin_name("print"));
    CHECK(is_builtin_name("NotImplementedError"));
    CHECK_FALSE(is_builtin_name("math"));
}
