#include "cli.hpp"

#include "refsol/corpus.hpp"
#include "refsol/pipeline.hpp"
#include "refsol/ranking.hpp"
#include "refsol/report.hpp"
#include "refsol/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace refsol::cli {

namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> corpus;
    std::optional<std::string> language;
    std::optional<std::size_t> top_k;
    std::optional<std::size_t> top_m;
    std::optional<std::string> out;
    std::optional<std::size_t> jobs;
    std::optional<std::int64_t> timeout_ms;
    bool verify = false;
    bool baseline = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw UsageError("config: " + key + " expects an integer, got '" + value + "'");
    }
    return out;
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw UsageError("config: " + key + " expects true or false, got '" + value + "'");
}

void validate(const RunConfig& c) {
    if (c.corpus_root.empty()) throw UsageError("no corpus given (--corpus or corpus= in the config file)");
    if (c.top_k < 1) throw UsageError("top-k must be at least 1");
    if (c.top_m < 1) throw UsageError("top-m must be at least 1");
    if (c.parallelism < 1) throw UsageError("jobs must be at least 1");
    if (c.timeout_ms < 1) throw UsageError("timeout-ms must be positive");
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed: " + path.string());
}

std::string file_stem(const std::string& problem_id) {
    std::string out = problem_id;
    for (char& c : out) {
        if (c == '/' || c == '\\') c = '_';
    }
    return out;
}

struct Loaded {
    Corpus corpus;
    std::vector<ProblemResult> results;
};

class Commands {
public:
    Commands(RunConfig config, std::ostream& out, std::ostream& err)
        : config_(std::move(config)), out_(out), err_(err) {}

    int normalize() {
        auto loaded = load();
        if (!loaded) return 2;
        std::size_t programs = 0, outliers = 0;
        for (const ProblemResult& r : loaded->results) {
            write_file(config_.output_dir / "normalized" / (file_stem(r.problem_id) + ".jsonl"), normalized_jsonl(r));
            programs += r.programs.size();
            outliers += r.outliers.size();
        }
        write_file(config_.output_dir / "outliers.csv", outliers_csv(loaded->results));
        out_ << "normalized " << programs << " programs in " << loaded->results.size() << " problems; "
             << outliers << " outliers\n";
        return 0;
    }

    int suggest() {
        auto loaded = load();
        if (!loaded) return 2;
        std::vector<std::string> warnings(loaded->results.size());
        std::size_t written = 0;
        std::mutex count_mutex;
        parallel_for(loaded->results.size(), config_.parallelism, [&](std::size_t i) {
            const ProblemResult& r = loaded->results[i];
            const auto& groups = config_.baseline ? r.baseline_groups : r.groups;
            std::vector<RankedSuggestion> suggestions;
            try {
                suggestions = refsol::suggest(r.problem_id, groups, config_.top_k, config_.top_m);
            } catch (const EmptyProblem& e) {
                warnings[i] = std::string("warning: skipping ") + e.what() + "\n";
                return;
            }
            std::optional<std::vector<EquivalenceVerdict>> verdicts;
            if (config_.verify) verdicts = verify_suggestions(loaded->corpus, r, suggestions);
            const auto* v = verdicts ? &*verdicts : nullptr;
            fs::path dir = config_.output_dir / "suggestions";
            std::string stem = file_stem(r.problem_id);
            write_file(dir / (stem + ".json"), suggestions_json(r.problem_id, suggestions, v));
            write_file(dir / (stem + ".md"), suggestions_markdown(r.problem_id, suggestions, v));
            write_file(config_.output_dir / "unique" / (stem + ".json"), unique_programs_json(r.problem_id, groups));
            std::lock_guard lock(count_mutex);
            ++written;
        });
        for (const std::string& w : warnings) err_ << w;
        out_ << "wrote suggestions for " << written << " problems\n";
        return 0;
    }

    int stats() {
        auto loaded = load();
        if (!loaded) return 2;
        std::vector<ProblemReport> reports;
        for (const ProblemResult& r : loaded->results) {
            if (r.report) reports.push_back(*r.report);
            else err_ << "warning: skipping " << r.problem_id << ": every submission is an outlier\n";
        }
        if (reports.empty()) {
            err_ << "no valid solutions\n";
            return 2;
        }
        std::string table = stats_csv(reports);
        write_file(config_.output_dir / "stats.csv", table);
        write_file(config_.output_dir / "coverage.csv", coverage_csv(reports));
        write_file(config_.output_dir / "outliers.csv", outliers_csv(loaded->results));
        out_ << table;
        return 0;
    }

    int verify() {
        auto loaded = load();
        if (!loaded) return 2;
        struct Row {
            std::string problem_id, submission_id;
            EquivalenceVerdict verdict;
        };
        std::vector<std::pair<const ProblemResult*, std::size_t>> jobs;
        for (const ProblemResult& r : loaded->results) {
            if (loaded->corpus.problems.at(r.problem_id).io_samples.empty()) continue;
            for (std::size_t i = 0; i < r.programs.size(); ++i) jobs.emplace_back(&r, i);
        }
        std::vector<Row> rows(jobs.size());
        parallel_for(jobs.size(), config_.parallelism, [&](std::size_t j) {
            const auto& [r, i] = jobs[j];
            const NormalizedProgram& p = r->programs[i];
            const Submission& original = find_submission(*r, p.submission_id);
            const auto& samples = loaded->corpus.problems.at(r->problem_id).io_samples;
            rows[j] = {r->problem_id, p.submission_id, check_equivalence(original, p.text, samples, config_.timeout_ms)};
        });
        std::string csv = "problem_id,submission_id,verdict\n";
        std::size_t equivalent = 0, divergent = 0, inconclusive = 0;
        for (const Row& row : rows) {
            csv += csv_field(row.problem_id) + ',' + csv_field(row.submission_id) + ',' +
                   csv_field(row.verdict.to_string()) + '\n';
            switch (row.verdict.kind) {
                case EquivalenceVerdict::Kind::Equivalent: ++equivalent; break;
                case EquivalenceVerdict::Kind::Divergent: ++divergent; break;
                case EquivalenceVerdict::Kind::Inconclusive: ++inconclusive; break;
            }
        }
        write_file(config_.output_dir / "verify.csv", csv);
        out_ << "verified " << rows.size() << " programs: " << equivalent << " equivalent, " << divergent
             << " divergent, " << inconclusive << " inconclusive\n";
        return 0;
    }

private:
    std::optional<Loaded> load() {
        LoadReport load_report;
        Corpus corpus = load_corpus(config_.corpus_root, &load_report);
        FilterReport filter_report;
        Loaded loaded;
        loaded.corpus = filter_valid(corpus, config_.language, &filter_report);
        for (const auto& [reason, count] : load_report.skipped) {
            err_ << "warning: skipped " << count << " metadata rows (" << reason << ")\n";
        }
        if (loaded.corpus.submissions.empty()) {
            err_ << "no valid solutions\n";
            return std::nullopt;
        }
        out_ << "loaded " << load_report.loaded << " submissions; kept " << loaded.corpus.submissions.size()
             << " (removed " << filter_report.not_accepted << " not accepted, " << filter_report.wrong_language
             << " other language, " << filter_report.not_public << " not public)\n";
        loaded.results = process_all(group_by_problem(loaded.corpus), config_.parallelism);
        return loaded;
    }

    static const Submission& find_submission(const ProblemResult& r, const std::string& id) {
        auto it = std::find_if(r.submissions.begin(), r.submissions.end(),
                               [&](const Submission& s) { return s.id == id; });
        if (it == r.submissions.end()) throw std::logic_error("unknown submission " + id);
        return *it;
    }

    // Compares each suggestion with the original source of a member whose
    // identifiers match the suggestion's restored map.
    std::vector<EquivalenceVerdict> verify_suggestions(const Corpus& corpus, const ProblemResult& r,
                                                       const std::vector<RankedSuggestion>& suggestions) const {
        const auto& samples = corpus.problems.at(r.problem_id).io_samples;
        std::vector<EquivalenceVerdict> verdicts;
        for (const RankedSuggestion& s : suggestions) {
            if (samples.empty()) {
                verdicts.push_back({EquivalenceVerdict::Kind::Inconclusive, 0, "no io samples"});
                continue;
            }
            std::string member = s.member_ids.front();
            if (!s.identifier_variants.empty()) {
                for (const NormalizedProgram& p : r.programs) {
                    if (p.text == s.normalized_text && p.map == s.identifier_variants.front().map) {
                        member = p.submission_id;
                        break;
                    }
                }
            }
            verdicts.push_back(check_equivalence(find_submission(r, member), s.program_text, samples, config_.timeout_ms));
        }
        return verdicts;
    }

    RunConfig config_;
    std::ostream& out_;
    std::ostream& err_;
};

void add_shared_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--config", o.config, "key=value config file; flags override it");
    cmd.add_option("--corpus", o.corpus, "corpus root directory");
    cmd.add_option("--language", o.language, "language label to keep (default Python3)");
    cmd.add_option("--top-k", o.top_k, "programs per problem (default 5)");
    cmd.add_option("--top-m", o.top_m, "identifier variants per program (default 3)");
    cmd.add_option("--out", o.out, "output directory (default refsol-out)");
    cmd.add_option("--jobs", o.jobs, "worker threads (default: hardware concurrency)");
    cmd.add_option("--timeout-ms", o.timeout_ms, "per-run timeout for program execution (default 2000)");
    cmd.add_flag("--verify", o.verify, "suggest: run each suggestion against the io samples");
    cmd.add_flag("--baseline", o.baseline, "suggest: rank raw-source groups instead of normalized ones");
}

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunConfig resolve(const Overrides& o) {
    RunConfig c;
    c.parallelism = std::max(1u, std::thread::hardware_concurrency());
    if (o.config) apply_config_text(c, read_text(*o.config));
    if (o.corpus) c.corpus_root = *o.corpus;
    if (o.language) c.language = *o.language;
    if (o.top_k) c.top_k = *o.top_k;
    if (o.top_m) c.top_m = *o.top_m;
    if (o.out) c.output_dir = *o.out;
    if (o.jobs) c.parallelism = *o.jobs;
    if (o.timeout_ms) c.timeout_ms = *o.timeout_ms;
    if (o.verify) c.verify = true;
    if (o.baseline) c.baseline = true;
    validate(c);
    return c;
}

}  // namespace

void apply_config_text(RunConfig& c, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config: expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        std::replace(key.begin(), key.end(), '-', '_');
        if (key == "corpus") c.corpus_root = value;
        else if (key == "language") c.language = value;
        else if (key == "top_k") c.top_k = parse_number<std::size_t>(key, value);
        else if (key == "top_m") c.top_m = parse_number<std::size_t>(key, value);
        else if (key == "out") c.output_dir = value;
        else if (key == "jobs") c.parallelism = parse_number<std::size_t>(key, value);
        else if (key == "timeout_ms") c.timeout_ms = parse_number<std::int64_t>(key, value);
        else if (key == "verify") c.verify = parse_flag(key, value);
        else if (key == "baseline") c.baseline = parse_flag(key, value);
        else throw UsageError("config: unknown key '" + key + "'");
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Normalize, deduplicate and rank solution programs"};
    app.name("refsol");
    app.require_subcommand(1);
    Overrides o;
    struct Entry {
        const char* name;
        const char* help;
        int (Commands::*fn)();
    };
    const Entry entries[] = {
        {"normalize", "write normalized programs as JSONL per problem", &Commands::normalize},
        {"suggest", "write ranked reference solutions per problem", &Commands::suggest},
        {"stats", "write unique-ratio and coverage tables", &Commands::stats},
        {"verify", "check that normalized programs behave like the originals", &Commands::verify},
    };
    std::vector<CLI::App*> subs;
    for (const Entry& e : entries) {
        subs.push_back(app.add_subcommand(e.name, e.help));
        add_shared_options(*subs.back(), o);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig config = resolve(o);
        Commands commands(config, out, err);
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) return (commands.*entries[i].fn)();
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace refsol::cli
