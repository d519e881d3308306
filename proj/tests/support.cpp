#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#ifndef REFSOL_FIXTURES
#error "REFSOL_FIXTURES must point at tests/fixtures"
#endif

namespace refsol::testing {

namespace fs = std::filesystem;

fs::path fixtures_dir() { return REFSOL_FIXTURES; }
fs::path fixture_corpus() { return fixtures_dir() / "corpus"; }

std::vector<fs::path> fixture_programs() {
    std::vector<fs::path> out;
    for (const auto& entry : fs::recursive_directory_iterator(fixture_corpus())) {
        if (entry.path().extension() == ".py") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TempDir::TempDir() {
    static std::random_device rd;
    std::mt19937_64 rng(rd());
    path_ = fs::temp_directory_path() / ("refsol-test-" + std::to_string(rng()));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

namespace {

// `{0}`..`{3}` are identifier slots, `~` an optional space, `@` a place
// where a comment line may appear, `$` a place for a docstring. Lines end
// with `\n`; `|` marks four-space indentation units.
const std::vector<std::string> kTemplates = {
    "$@{0}~=~int(input())\n{1}~=~0\nfor {2} in range(1,~{0}~+~K):\n|{1}~+=~{2}~*~{2}\n@print({1})\n",
    "$def {3}({0}):\n|$@return sum({2}~*~K for {2} in range({0}))\n@print({3}(int(input())))\n",
    "${0}~=~input()\n@{1}~=~[{2} for {2} in {0} if {2}~!=~'K']\nprint(len({1}))\n",
    "$class {3}:\n|def __init__(self,~{0}):\n||self.v~=~{0}~+~K\n|def get(self):\n||$return self.v\n@print({3}(1).get())\n",
    "${0}~=~{{}}\nfor {1} in range(K):\n|@{0}[{1}]~=~{1}~**~2\n{2}~=~lambda {1}:~{0}.get({1},~0)\nprint({2}(K))\n",
    "$import math\n{0}~=~math.sqrt(K)\n@print(f\"{{{0}:.3f}}\")\n",
    "$def {3}({0},~{1}=K):\n|@if {0}~<~{1}:\n||return {0}\n|return {3}({0}~-~{1},~{1})\nprint({3}(int(input())))\n",
};

const std::vector<std::string> kNamePool = {
    "a",   "b",    "c",     "n",   "m",      "k",     "idx",   "val",  "total", "acc", "res",
    "out", "data", "items", "cnt", "number", "value", "chars", "word", "fn",    "go",  "Box",
    "Acc", "tmp",  "x1",    "y2",  "zz",     "buf",   "limit", "step", "mem",   "key",
};

const std::vector<std::string> kComments = {"# note", "# TODO: tidy", "# compute", "#", "# step 2"};

std::string render(const std::string& tmpl, int k, const std::vector<std::string>& names,
                   std::mt19937_64& rng, bool disguise) {
    std::uniform_int_distribution<int> coin(0, 3);
    std::string out;
    std::string line_indent;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        char c = tmpl[i];
        if (c == '|') {
            out += "    ";
            line_indent += "    ";
            continue;
        }
        if (c == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
            out += '{';
            ++i;
        } else if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
            out += '}';
            ++i;
        } else if (c == '{') {
            out += names.at(static_cast<std::size_t>(tmpl[i + 1] - '0'));
            i += 2;
        } else if (c == 'K') {
            out += std::to_string(k);
        } else if (c == '~') {
            if (disguise && coin(rng) == 0) out += ' ';
        } else if (c == '@') {
            if (disguise && coin(rng) == 0) out += kComments[rng() % kComments.size()] + "\n" + line_indent;
        } else if (c == '$') {
            if (disguise && coin(rng) == 0) out += "\"\"\"doc\"\"\"\n" + line_indent;
        } else if (c == '\n') {
            if (disguise && coin(rng) == 0) out += "  # trailing";
            out += '\n';
            if (disguise && coin(rng) == 0) out += '\n';
            line_indent.clear();
        } else {
            out += c;
        }
    }
    return out;
}

}  // namespace

std::vector<SyntheticProgram> synthetic_problem(std::uint64_t seed, std::size_t size) {
    std::mt19937_64 rng(seed);
    std::size_t approaches = 1 + rng() % 6;
    struct Approach {
        std::size_t tmpl;
        int k;
    };
    std::vector<Approach> pool;
    for (std::size_t i = 0; i < approaches; ++i) {
        pool.push_back({static_cast<std::size_t>(rng() % kTemplates.size()), static_cast<int>(1 + rng() % 3)});
    }
    // Skewed popularity, like real submission counts.
    std::vector<double> weights;
    for (std::size_t i = 0; i < approaches; ++i) weights.push_back(1.0 / static_cast<double>(i + 1));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

    std::vector<SyntheticProgram> out;
    for (std::size_t i = 0; i < size; ++i) {
        const Approach& a = pool[pick(rng)];
        std::vector<std::string> names = kNamePool;
        std::shuffle(names.begin(), names.end(), rng);
        names.resize(4);
        bool disguise = rng() % 4 != 0;
        if (!disguise && rng() % 2 == 0) names = {"a", "b", "c", "f"};  // verbatim copies for the baseline
        SyntheticProgram p;
        p.submission.id = "s" + std::to_string(seed) + "_" + std::to_string(i);
        p.submission.problem_id = "synthetic" + std::to_string(seed);
        p.submission.user_id = "u" + std::to_string(rng() % 50);
        p.submission.submitted_at = static_cast<std::int64_t>(1000 + rng() % 100000);
        p.submission.verdict = Verdict::parse("AC");
        p.submission.language = "Python3";
        p.submission.is_public = true;
        p.submission.source = render(kTemplates[a.tmpl], a.k, names, rng, disguise);
        p.truth = std::to_string(a.tmpl) + ":" + std::to_string(a.k);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace refsol::testing
