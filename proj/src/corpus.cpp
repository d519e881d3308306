#include "refsol/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace refsol {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kHeader = {"id",       "user_id",  "submitted_at",
                                          "verdict",  "language", "is_public"};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<bool> parse_bool(std::string_view text) {
    std::string v = lower(trim(text));
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    return std::nullopt;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
    std::string v = trim(text);
    if (v.empty()) return 0;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
    return out;
}

// Physical lines of a CSV file, joining lines that sit inside quotes.
std::vector<std::string> csv_records(const std::string& text) {
    std::vector<std::string> records;
    std::string current;
    bool quoted = false;
    for (char c : text) {
        if (c == '"') quoted = !quoted;
        if (c == '\n' && !quoted) {
            if (!current.empty() && current.back() == '\r') current.pop_back();
            records.push_back(std::move(current));
            current.clear();
            continue;
        }
        current.push_back(c);
    }
    if (!current.empty()) {
        if (current.back() == '\r') current.pop_back();
        records.push_back(std::move(current));
    }
    return records;
}

std::vector<IoSample> load_samples(const fs::path& dir) {
    std::vector<IoSample> samples;
    if (!fs::is_directory(dir)) return samples;
    std::vector<std::pair<long, fs::path>> inputs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".in") continue;
        std::string stem = entry.path().stem().string();
        long n = 0;
        auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), n);
        if (ec != std::errc() || ptr != stem.data() + stem.size()) continue;
        inputs.emplace_back(n, entry.path());
    }
    std::sort(inputs.begin(), inputs.end());
    for (const auto& [n, in] : inputs) {
        fs::path out = in;
        out.replace_extension(".out");
        if (!fs::exists(out)) continue;
        samples.push_back(IoSample{read_file(in), read_file(out)});
    }
    return samples;
}

}  // namespace

Verdict Verdict::parse(std::string_view text) {
    std::string t = trim(text);
    std::string key = lower(t);
    if (key == "ac" || key == "accepted") return {Tag::Accepted, {}};
    if (key == "wa" || key == "wrong answer" || key == "wronganswer") return {Tag::WrongAnswer, {}};
    if (key == "re" || key == "runtime error" || key == "runtimeerror") return {Tag::RuntimeError, {}};
    return {Tag::Other, t};
}

std::string Verdict::to_string() const {
    switch (tag) {
        case Tag::Accepted: return "AC";
        case Tag::WrongAnswer: return "WA";
        case Tag::RuntimeError: return "RE";
        case Tag::Other: return label;
    }
    return label;
}

std::size_t LoadReport::total_skipped() const {
    std::size_t n = 0;
    for (const auto& [reason, count] : skipped) n += count;
    return n;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back().push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                fields.back().push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back().push_back(c);
        }
    }
    return fields;
}

Corpus load_corpus(const fs::path& root, LoadReport* report) {
    if (!fs::exists(root)) throw MissingRoot(root);
    if (!fs::is_directory(root)) throw MalformedLayout("corpus root is not a directory: " + root.string());

    std::vector<fs::path> problem_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "metadata.csv")) {
            problem_dirs.push_back(entry.path());
        }
    }
    if (problem_dirs.empty()) {
        throw MalformedLayout("no problem directories with metadata.csv under " + root.string());
    }
    std::sort(problem_dirs.begin(), problem_dirs.end());

    LoadReport local;
    LoadReport& rep = report ? *report : local;
    rep = LoadReport{};
    auto skip = [&](const std::string& reason) { ++rep.skipped[reason]; };

    Corpus corpus;
    std::set<std::string> seen_ids;
    for (const fs::path& dir : problem_dirs) {
        Problem problem;
        problem.id = dir.filename().string();
        problem.io_samples = load_samples(dir / "io_samples");

        auto records = csv_records(read_file(dir / "metadata.csv"));
        if (records.empty() || split_csv_line(records.front()) != kHeader) {
            throw MalformedLayout("unexpected metadata header in " + (dir / "metadata.csv").string());
        }
        for (std::size_t r = 1; r < records.size(); ++r) {
            if (trim(records[r]).empty()) continue;
            ++rep.rows;
            auto fields = split_csv_line(records[r]);
            if (fields.size() != kHeader.size()) {
                skip("column count");
                continue;
            }
            Submission s;
            s.id = trim(fields[0]);
            s.problem_id = problem.id;
            s.user_id = trim(fields[1]);
            s.language = trim(fields[4]);
            if (s.id.empty()) {
                skip("missing id");
                continue;
            }
            if (trim(fields[3]).empty()) {
                skip("missing verdict");
                continue;
            }
            s.verdict = Verdict::parse(fields[3]);
            auto ts = parse_timestamp(fields[2]);
            if (!ts) {
                skip("bad timestamp");
                continue;
            }
            s.submitted_at = *ts;
            auto pub = parse_bool(fields[5]);
            if (!pub) {
                skip("bad is_public");
                continue;
            }
            s.is_public = *pub;
            if (seen_ids.count(s.id)) {
                skip("duplicate id");
                continue;
            }
            fs::path src = dir / "src" / (s.id + ".py");
            if (!fs::is_regular_file(src)) {
                skip("missing source");
                continue;
            }
            s.source = read_file(src);
            if (trim(s.source).empty()) {
                skip("empty source");
                continue;
            }
            seen_ids.insert(s.id);
            corpus.submissions.push_back(std::move(s));
            ++rep.loaded;
        }
        corpus.problems.emplace(problem.id, std::move(problem));
    }
    return corpus;
}

Corpus filter_valid(const Corpus& corpus, std::string_view language, FilterReport* report) {
    FilterReport local;
    FilterReport& rep = report ? *report : local;
    rep = FilterReport{};
    Corpus out;
    out.problems = corpus.problems;
    for (const Submission& s : corpus.submissions) {
        if (!s.verdict.accepted()) {
            ++rep.not_accepted;
        } else if (s.language != language) {
            ++rep.wrong_language;
        } else if (!s.is_public) {
            ++rep.not_public;
        } else {
            out.submissions.push_back(s);
        }
    }
    return out;
}

ProblemGroups group_by_problem(const Corpus& corpus) {
    ProblemGroups groups;
    for (const Submission& s : corpus.submissions) groups[s.problem_id].push_back(s);
    for (auto& [id, list] : groups) {
        std::sort(list.begin(), list.end(), [](const Submission& a, const Submission& b) {
            return std::tie(a.submitted_at, a.id) < std::tie(b.submitted_at, b.id);
        });
    }
    return groups;
}

}  // namespace refsol
