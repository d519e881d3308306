#include "support.hpp"

#include "refsol/corpus.hpp"

#include <doctest.h>

#include <fstream>

using namespace refsol;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

const char* kHeader = "id,user_id,submitted_at,verdict,language,is_public\n";

}  // namespace

TEST_CASE("2 problems x 3 submissions") {
    testing::TempDir dir;
    for (std::string pid : {"p1", "p2"}) {
        std::string meta = kHeader;
        for (int i = 0; i < 3; ++i) {
            std::string id = pid + "_" + std::to_string(i);
            meta += id + ",u,100,AC,Python3,true\n";
            write(dir.path() / pid / "src" / (id + ".py"), "print(1)\n");
        }
        write(dir.path() / pid / "metadata.csv", meta);
    }
    LoadReport report;
    Corpus c = load_corpus(dir.path(), &report);
    CHECK(c.problems.size() == 2);
    CHECK(c.submissions.size() == 6);
    CHECK(report.total_skipped() == 0);
    CHECK(c.submissions[0].problem_id == "p1");
}

TEST_CASE("missing and empty roots") {
    testing::TempDir dir;
    CHECK_THROWS_AS(load_corpus(dir.path() / "nope"), MissingRoot);
    CHECK_THROWS_AS(load_corpus(dir.path()), MalformedLayout);
}

TEST_CASE("malformed rows are skipped and counted") {
    testing::TempDir dir;
    write(dir.path() / "p" / "metadata.csv", std::string(kHeader) +
                                                 "a,u,1,,Python3,true\n"
                                                 "b,u,notatime,AC,Python3,true\n"
                                                 "c,u,1,AC,Python3\n"
                                                 "d,u,1,AC,Python3,true\n"
                                                 "e,u,,AC,Python3,maybe\n"
                                                 "f,u,,AC,Python3,true\n");
    for (std::string id : {"a", "b", "c", "f"}) write(dir.path() / "p" / "src" / (id + ".py"), "x = 1\n");
    LoadReport report;
    Corpus c = load_corpus(dir.path(), &report);
    REQUIRE(c.submissions.size() == 1);
    CHECK(c.submissions[0].id == "f");
    CHECK(c.submissions[0].submitted_at == 0);
    CHECK(report.rows == 6);
    CHECK(report.skipped.at("missing verdict") == 1);
    CHECK(report.skipped.at("bad timestamp") == 1);
    CHECK(report.skipped.at("column count") == 1);
    CHECK(report.skipped.at("missing source") == 1);
    CHECK(report.skipped.at("bad is_public") == 1);
}

TEST_CASE("a single row missing its verdict loads nothing") {
    testing::TempDir dir;
    write(dir.path() / "p" / "metadata.csv", std::string(kHeader) + "a,u,1,,Python3,true\n");
    write(dir.path() / "p" / "src" / "a.py", "x = 1\n");
    LoadReport report;
    CHECK(load_corpus(dir.path(), &report).submissions.empty());
    CHECK(report.total_skipped() == 1);
}

TEST_CASE("quoted csv fields") {
    CHECK(split_csv_line("a,\"b,c\",\"d\"\"e\"") == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(split_csv_line("").size() == 1);
}

TEST_CASE("filter_valid") {
    Corpus c;
    auto add = [&](std::string id, std::string verdict, std::string lang, bool pub) {
        Submission s;
        s.id = id;
        s.problem_id = "p";
        s.verdict = Verdict::parse(verdict);
        s.language = lang;
        s.is_public = pub;
        s.source = "x";
        c.submissions.push_back(s);
    };
    for (int i = 0; i < 6; ++i) add("ok" + std::to_string(i), "AC", "Python3", true);
    for (int i = 0; i < 3; ++i) add("wa" + std::to_string(i), "WA", "Python3", true);
    add("private", "AC", "Python3", false);
    FilterReport report;
    Corpus kept = filter_valid(c, "Python3", &report);
    CHECK(kept.submissions.size() == 6);
    CHECK(report.not_accepted == 3);
    CHECK(report.not_public == 1);
    CHECK(kept.submissions.size() + report.total_removed() == c.submissions.size());

    add("cpp", "AC", "C++", true);
    add("py38", "AC", "Python3.8", true);
    kept = filter_valid(c, "Python3", &report);
    CHECK(report.wrong_language == 2);

    Corpus all_wa;
    all_wa.submissions.assign(c.submissions.begin() + 6, c.submissions.begin() + 9);
    CHECK(filter_valid(all_wa, "Python3").submissions.empty());
}

TEST_CASE("verdict labels") {
    CHECK(Verdict::parse("AC").accepted());
    CHECK(Verdict::parse("Accepted").accepted());
    CHECK(Verdict::parse("Wrong Answer").tag == Verdict::Tag::WrongAnswer);
    CHECK(Verdict::parse("RE").tag == Verdict::Tag::RuntimeError);
    auto other = Verdict::parse("Time Limit Exceeded");
    CHECK(other.tag == Verdict::Tag::Other);
    CHECK(other.to_string() == "Time Limit Exceeded");
}

TEST_CASE("group_by_problem") {
    Corpus c;
    auto add = [&](std::string id, std::string pid, std::int64_t ts) {
        Submission s;
        s.id = id;
        s.problem_id = pid;
        s.submitted_at = ts;
        c.submissions.push_back(s);
    };
    add("d", "p1", 5);
    add("b", "p1", 3);
    add("c", "p1", 3);
    add("a", "p1", 9);
    add("x", "p2", 1);
    add("y", "p2", 0);
    auto groups = group_by_problem(c);
    REQUIRE(groups.size() == 2);
    CHECK(groups["p1"].size() == 4);
    CHECK(groups["p2"].size() == 2);
    std::vector<std::string> order;
    for (auto& s : groups["p1"]) order.push_back(s.id);
    CHECK(order == std::vector<std::string>{"b", "c", "d", "a"});
    CHECK(group_by_problem(Corpus{}).empty());
}

TEST_CASE("fixture corpus loads deterministically") {
    LoadReport r1, r2;
    Corpus a = load_corpus(testing::fixture_corpus(), &r1);
    Corpus b = load_corpus(testing::fixture_corpus(), &r2);
    REQUIRE(a.submissions.size() == b.submissions.size());
    for (std::size_t i = 0; i < a.submissions.size(); ++i) {
        CHECK(a.submissions[i].id == b.submissions[i].id);
        CHECK(a.submissions[i].source == b.submissions[i].source);
    }
    CHECK(a.problems.at("sum_ab").io_samples.size() == 3);
    CHECK(a.problems.at("shapes").io_samples.empty());
    for (const Submission& s : a.submissions) CHECK(a.problems.count(s.problem_id) == 1);
}
