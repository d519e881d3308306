#include "support.hpp"

#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace refsol;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = refsol::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Corpus holding copies of the named fixture problems.
fs::path subset(const testing::TempDir& dir, std::initializer_list<std::string> problems) {
    fs::path root = dir.path() / "corpus";
    for (const auto& p : problems) {
        fs::create_directories(root / p);
        fs::copy(testing::fixture_corpus() / p, root / p, fs::copy_options::recursive);
    }
    return root;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = testing::read_text(e.path());
    }
    return files;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("normalize writes one JSONL per problem and reports outliers") {
    testing::TempDir dir;
    fs::path out = dir.path() / "out";
    auto r = invoke({"normalize", "--corpus", testing::fixture_corpus().string(), "--out", out.string(), "--jobs", "2"});
    REQUIRE(r.code == 0);
    std::size_t lines = 0, outliers = 0;
    for (const auto& e : fs::directory_iterator(out / "normalized")) {
        std::ifstream in(e.path());
        std::string line;
        while (std::getline(in, line)) {
            auto j = nlohmann::json::parse(line);
            ++lines;
            if (j["outlier"].get<bool>()) {
                ++outliers;
                CHECK(j["reason"].is_string());
            } else {
                CHECK(j["normalized_text"].is_string());
                CHECK(j["identifier_map"].is_array());
                CHECK_FALSE(j.contains("reason"));
            }
            CHECK(j["submission_id"].is_string());
            CHECK(j["problem_id"].get<std::string>() == e.path().stem().string());
        }
    }
    CHECK(lines == 69);
    CHECK(outliers == 1);
    CHECK(count_lines(testing::read_text(out / "outliers.csv")) == 2);
    CHECK(r.out.find("68 programs") != std::string::npos);
}

TEST_CASE("only wrong answers -> exit 2") {
    testing::TempDir dir;
    auto r = invoke({"normalize", "--corpus", (testing::fixtures_dir() / "corpus_all_wa").string(), "--out",
                  dir.path().string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("no valid solutions") != std::string::npos);
    CHECK(invoke({"stats", "--corpus", (testing::fixtures_dir() / "corpus_all_wa").string(), "--out",
               dir.path().string()})
              .code == 2);
}

TEST_CASE("operational errors -> exit 1") {
    testing::TempDir dir;
    CHECK(invoke({"stats", "--corpus", (dir.path() / "missing").string(), "--out", dir.path().string()}).code == 1);
    CHECK(invoke({"stats", "--out", dir.path().string()}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({"suggest", "--corpus", testing::fixture_corpus().string(), "--top-k", "0"}).code == 1);
    CHECK(invoke({}).code == 1);
}

TEST_CASE("suggest: counts 5/3/2, k=2") {
    testing::TempDir dir;
    fs::path corpus = subset(dir, {"vowels", "sum_squares"});
    fs::path out = dir.path() / "out";
    REQUIRE(invoke({"suggest", "--corpus", corpus.string(), "--out", out.string(), "--top-k", "2"}).code == 0);
    auto doc = nlohmann::json::parse(testing::read_text(out / "suggestions" / "vowels.json"));
    auto& s = doc["suggestions"];
    REQUIRE(s.size() == 2);
    CHECK(s[0]["rank"] == 1);
    CHECK(s[0]["duplicate_count"] == 5);
    CHECK(s[0]["coverage_share"].get<double>() == doctest::Approx(0.5));
    CHECK(s[1]["coverage_share"].get<double>() == doctest::Approx(0.3));
    CHECK(s[0]["identifier_variants"].size() == 2);
    CHECK(fs::exists(out / "suggestions" / "vowels.md"));
    auto unique = nlohmann::json::parse(testing::read_text(out / "unique" / "vowels.json"));
    CHECK(unique["unique_programs"].size() == 3);
    for (const auto& g : unique["unique_programs"]) {
        CHECK(g.contains("normalized_text"));
        CHECK(g.contains("member_ids"));
        CHECK(g.contains("earliest_submission"));
        CHECK(g["member_ids"].size() == g["duplicate_count"].get<std::size_t>());
    }

    REQUIRE(invoke({"suggest", "--corpus", corpus.string(), "--out", out.string(), "--top-k", "10"}).code == 0);
    auto all = nlohmann::json::parse(testing::read_text(out / "suggestions" / "sum_squares.json"));
    REQUIRE(all["suggestions"].size() == 3);
    std::vector<int> counts;
    for (const auto& x : all["suggestions"]) counts.push_back(x["duplicate_count"]);
    CHECK(counts == std::vector<int>{6, 4, 2});
}

TEST_CASE("suggest --baseline ranks raw programs") {
    testing::TempDir dir;
    fs::path corpus = subset(dir, {"sum_squares"});
    fs::path out = dir.path() / "out";
    REQUIRE(invoke({"suggest", "--corpus", corpus.string(), "--out", out.string(), "--top-k", "20", "--baseline"}).code == 0);
    auto doc = nlohmann::json::parse(testing::read_text(out / "suggestions" / "sum_squares.json"));
    CHECK(doc["suggestions"].size() == 12);
}

TEST_CASE("suggest --verify annotates every suggestion") {
    testing::TempDir dir;
    fs::path corpus = subset(dir, {"vowels"});
    fs::path out = dir.path() / "out";
    REQUIRE(invoke({"suggest", "--corpus", corpus.string(), "--out", out.string(), "--verify"}).code == 0);
    auto doc = nlohmann::json::parse(testing::read_text(out / "suggestions" / "vowels.json"));
    REQUIRE(doc["suggestions"].size() == 3);
    for (const auto& s : doc["suggestions"]) CHECK(s["verification"] == "Equivalent");
    CHECK(testing::read_text(out / "suggestions" / "vowels.md").find("verification: Equivalent") != std::string::npos);
}

TEST_CASE("stats") {
    testing::TempDir dir;
    fs::path out = dir.path() / "out";
    auto r = invoke({"stats", "--corpus", testing::fixture_corpus().string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    std::string csv = testing::read_text(out / "stats.csv");
    CHECK(csv.find("\nsum_squares,12,12,100.00%,3,25.00%,0\n") != std::string::npos);
    CHECK(csv.find("\nvowels,10,10,100.00%,3,30.00%,0\n") != std::string::npos);
    CHECK(csv.find("\nmax_value,2,2,100.00%,2,100.00%,1\n") != std::string::npos);
    CHECK(csv.find("\nMean,") != std::string::npos);
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
        auto f = split_csv_line(line);
        if (f[0] == "Mean") continue;
        CHECK(std::stoul(f[2]) >= std::stoul(f[4]));
    }
    CHECK(fs::exists(out / "coverage.csv"));

    fs::path single = subset(dir, {"sum_squares"});
    fs::path out1 = dir.path() / "out1";
    REQUIRE(invoke({"stats", "--corpus", single.string(), "--out", out1.string()}).code == 0);
    CHECK(testing::read_text(out1 / "stats.csv") ==
          "problem_id,n_solutions,baseline_unique,baseline_ratio,ours_unique,ours_ratio,outliers\n"
          "sum_squares,12,12,100.00%,3,25.00%,0\n"
          "Mean,12.000000,12.000000,100.00%,3.000000,25.00%,0.000000\n");
}

TEST_CASE("config file with flag overrides") {
    testing::TempDir dir;
    fs::path corpus = subset(dir, {"vowels"});
    fs::path cfg = dir.path() / "refsol.conf";
    std::ofstream(cfg) << "# run settings\ncorpus = " << corpus.string() << "\nout = \"" << (dir.path() / "a").string()
                       << "\"\ntop_k = 1\ntop-m = 1\njobs=2\n";
    REQUIRE(invoke({"suggest", "--config", cfg.string()}).code == 0);
    auto a = nlohmann::json::parse(testing::read_text(dir.path() / "a" / "suggestions" / "vowels.json"));
    CHECK(a["suggestions"].size() == 1);
    CHECK(a["suggestions"][0]["identifier_variants"].size() == 1);

    REQUIRE(invoke({"suggest", "--config", cfg.string(), "--top-k", "3", "--out", (dir.path() / "b").string()}).code == 0);
    auto b = nlohmann::json::parse(testing::read_text(dir.path() / "b" / "suggestions" / "vowels.json"));
    CHECK(b["suggestions"].size() == 3);

    refsol::cli::RunConfig c;
    CHECK_THROWS(refsol::cli::apply_config_text(c, "colour = blue\n"));
    CHECK_THROWS(refsol::cli::apply_config_text(c, "top_k = many\n"));
    CHECK_THROWS(refsol::cli::apply_config_text(c, "just words\n"));
    refsol::cli::apply_config_text(c, "language = Python3.8\nverify = true\n");
    CHECK(c.language == "Python3.8");
    CHECK(c.verify);
}

TEST_CASE("reports are byte-identical across runs and job counts") {
    testing::TempDir dir;
    fs::path a = dir.path() / "a", b = dir.path() / "b";
    std::string corpus = testing::fixture_corpus().string();
    for (const char* cmd : {"normalize", "suggest", "stats"}) {
        REQUIRE(invoke({cmd, "--corpus", corpus, "--out", a.string(), "--jobs", "1"}).code == 0);
        REQUIRE(invoke({cmd, "--corpus", corpus, "--out", b.string(), "--jobs", "4"}).code == 0);
    }
    auto sa = snapshot(a), sb = snapshot(b);
    CHECK(sa.size() > 30);
    CHECK(sa == sb);
}
