#include "refsol/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace refsol {

namespace {

using nlohmann::ordered_json;

ordered_json map_json(const IdentifierMap& map) {
    ordered_json arr = ordered_json::array();
    for (const auto& [placeholder, original] : map.entries) arr.push_back({placeholder, original});
    return arr;
}

std::string decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fence(const std::string& code) {
    // Longer fence than any backtick run inside the code.
    std::size_t longest = 0, run = 0;
    for (char c : code) {
        run = c == '`' ? run + 1 : 0;
        longest = std::max(longest, run);
    }
    return std::string(std::max<std::size_t>(3, longest + 1), '`');
}

std::string md_cell(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else out.push_back(c);
    }
    return "`" + out + "`";
}

}  // namespace

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

std::string normalized_jsonl(const ProblemResult& result) {
    std::string out;
    for (const NormalizedProgram& p : result.programs) {
        ordered_json line;
        line["submission_id"] = p.submission_id;
        line["problem_id"] = result.problem_id;
        line["normalized_text"] = p.text;
        line["identifier_map"] = map_json(p.map);
        line["outlier"] = false;
        out += line.dump() + "\n";
    }
    for (const Outlier& o : result.outliers) {
        ordered_json line;
        line["submission_id"] = o.submission_id;
        line["problem_id"] = result.problem_id;
        line["normalized_text"] = nullptr;
        line["identifier_map"] = ordered_json::array();
        line["outlier"] = true;
        line["reason"] = o.reason;
        out += line.dump() + "\n";
    }
    return out;
}

std::string unique_programs_json(const std::string& problem_id, const std::vector<UniqueProgram>& groups) {
    ordered_json doc;
    doc["problem_id"] = problem_id;
    doc["unique_programs"] = ordered_json::array();
    for (const UniqueProgram& g : groups) {
        ordered_json item;
        item["normalized_text"] = g.normalized_text;
        item["duplicate_count"] = g.duplicate_count;
        item["member_ids"] = g.member_ids;
        item["earliest_submission"] = g.earliest_submission;
        doc["unique_programs"].push_back(std::move(item));
    }
    return doc.dump(2) + "\n";
}

std::string suggestions_json(const std::string& problem_id, const std::vector<RankedSuggestion>& suggestions,
                             const std::vector<EquivalenceVerdict>* verdicts) {
    ordered_json doc;
    doc["problem_id"] = problem_id;
    doc["suggestions"] = ordered_json::array();
    for (std::size_t i = 0; i < suggestions.size(); ++i) {
        const RankedSuggestion& s = suggestions[i];
        ordered_json item;
        item["rank"] = s.rank;
        item["program_text"] = s.program_text;
        item["duplicate_count"] = s.duplicate_count;
        item["coverage_share"] = s.coverage_share;
        item["identifier_variants"] = ordered_json::array();
        for (const MapVariant& v : s.identifier_variants) {
            item["identifier_variants"].push_back({{"identifier_map", map_json(v.map)}, {"map_count", v.count}});
        }
        if (verdicts) item["verification"] = (*verdicts)[i].to_string();
        doc["suggestions"].push_back(std::move(item));
    }
    return doc.dump(2) + "\n";
}

std::string suggestions_markdown(const std::string& problem_id, const std::vector<RankedSuggestion>& suggestions,
                                 const std::vector<EquivalenceVerdict>* verdicts) {
    std::ostringstream out;
    out << "# " << problem_id << "\n";
    for (std::size_t i = 0; i < suggestions.size(); ++i) {
        const RankedSuggestion& s = suggestions[i];
        out << "\n## Rank " << s.rank << "\n\n";
        out << "- duplicate_count: " << s.duplicate_count << "\n";
        out << "- coverage_share: " << decimal(s.coverage_share) << "\n";
        if (verdicts) out << "- verification: " << (*verdicts)[i].to_string() << "\n";
        std::string f = fence(s.program_text);
        out << "\n" << f << "python\n" << s.program_text;
        if (!s.program_text.empty() && s.program_text.back() != '\n') out << "\n";
        out << f << "\n";
        if (!s.identifier_variants.empty()) {
            out << "\n| variant | map_count | identifiers |\n|---|---|---|\n";
            for (std::size_t v = 0; v < s.identifier_variants.size(); ++v) {
                const MapVariant& mv = s.identifier_variants[v];
                std::string ids;
                for (const auto& [placeholder, original] : mv.map.entries) {
                    if (!ids.empty()) ids += ", ";
                    ids += md_cell(placeholder + " -> " + original);
                }
                out << "| " << v + 1 << " | " << mv.count << " | " << (ids.empty() ? "(none)" : ids) << " |\n";
            }
        }
    }
    return out.str();
}

std::string stats_csv(std::span<const ProblemReport> reports) {
    std::ostringstream out;
    out << "problem_id,n_solutions,baseline_unique,baseline_ratio,ours_unique,ours_ratio,outliers\n";
    for (const ProblemReport& r : reports) {
        out << csv_field(r.problem_id) << ',' << r.n_solutions << ',' << r.n_unique_baseline << ','
            << r.baseline_ratio.percent() << ',' << r.n_unique << ',' << r.unique_ratio.percent() << ','
            << r.n_outliers << '\n';
    }
    if (!reports.empty()) {
        auto mean = [&](auto field) { return mean_over_problems(reports, field); };
        out << "Mean," << decimal(mean([](const ProblemReport& r) { return double(r.n_solutions); })) << ','
            << decimal(mean([](const ProblemReport& r) { return double(r.n_unique_baseline); })) << ','
            << percent(mean([](const ProblemReport& r) { return r.baseline_ratio.value(); })) << ','
            << decimal(mean([](const ProblemReport& r) { return double(r.n_unique); })) << ','
            << percent(mean([](const ProblemReport& r) { return r.unique_ratio.value(); })) << ','
            << decimal(mean([](const ProblemReport& r) { return double(r.n_outliers); })) << '\n';
    }
    return out.str();
}

std::string coverage_csv(std::span<const ProblemReport> reports) {
    std::ostringstream out;
    out << "problem_id,n,coverage\n";
    std::size_t longest = 0;
    for (const ProblemReport& r : reports) {
        longest = std::max(longest, r.coverage_curve.size());
        for (const auto& [n, c] : r.coverage_curve) {
            out << csv_field(r.problem_id) << ',' << n << ',' << decimal(c.value()) << '\n';
        }
    }
    if (!reports.empty()) {
        for (std::size_t n = 1; n <= longest; ++n) out << "Mean," << n << ',' << decimal(mean_coverage_at(reports, n)) << '\n';
    }
    return out.str();
}

std::string outliers_csv(std::span<const ProblemResult> results) {
    std::string out = "problem_id,submission_id,reason\n";
    for (const ProblemResult& r : results) {
        for (const Outlier& o : r.outliers) {
            out += csv_field(r.problem_id) + ',' + csv_field(o.submission_id) + ',' + csv_field(o.reason) + '\n';
        }
    }
    return out;
}

}  // namespace refsol
