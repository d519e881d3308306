#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace refsol {

struct Verdict {
    enum class Tag { Accepted, WrongAnswer, RuntimeError, Other };

    Tag tag = Tag::Other;
    std::string label;  // original text for Other

    static Verdict parse(std::string_view text);
    bool accepted() const { return tag == Tag::Accepted; }
    std::string to_string() const;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct Submission {
    std::string id;
    std::string problem_id;
    std::string user_id;
    std::int64_t submitted_at = 0;  // UTC seconds; 0 when unknown
    Verdict verdict;
    std::string language;
    std::string source;
    bool is_public = false;
};

struct IoSample {
    std::string input;
    std::string expected_output;
};

struct Problem {
    std::string id;
    std::optional<std::string> title;
    std::vector<IoSample> io_samples;
};

struct Corpus {
    std::map<std::string, Problem> problems;
    std::vector<Submission> submissions;
};

/// Rows of metadata.csv that could not be turned into submissions.
struct LoadReport {
    std::size_t rows = 0;
    std::size_t loaded = 0;
    std::map<std::string, std::size_t> skipped;  // reason -> count

    std::size_t total_skipped() const;
};

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingRoot : public CorpusError {
public:
    explicit MissingRoot(const std::filesystem::path& root)
        : CorpusError("corpus root does not exist: " + root.string()) {}
};

class MalformedLayout : public CorpusError {
public:
    using CorpusError::CorpusError;
};

/// Reads `<root>/<problem_id>/metadata.csv`, `src/<id>.py` and optional
/// `io_samples/<n>.in|.out`. Problems are visited in name order and rows in
/// file order, so the result depends only on the directory contents.
Corpus load_corpus(const std::filesystem::path& root, LoadReport* report = nullptr);

struct FilterReport {
    std::size_t not_accepted = 0;
    std::size_t wrong_language = 0;
    std::size_t not_public = 0;

    std::size_t total_removed() const { return not_accepted + wrong_language + not_public; }
};

/// Keeps accepted, public submissions whose language label equals
/// `language` exactly. Each removed submission is counted once, under the
/// first failing check in that order.
Corpus filter_valid(const Corpus& corpus, std::string_view language, FilterReport* report = nullptr);

using ProblemGroups = std::map<std::string, std::vector<Submission>>;

/// Submissions per problem, ordered by submitted_at then id.
ProblemGroups group_by_problem(const Corpus& corpus);

/// Splits one CSV record (RFC 4180 quoting). Exposed for tests.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace refsol
