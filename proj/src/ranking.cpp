#include "refsol/ranking.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <tuple>

namespace refsol {

std::string serialize_map(const IdentifierMap& map) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [placeholder, original] : map.entries) arr.push_back({placeholder, original});
    return arr.dump();
}

std::vector<UniqueProgram> rank_programs(std::vector<UniqueProgram> groups) {
    std::sort(groups.begin(), groups.end(), [](const UniqueProgram& a, const UniqueProgram& b) {
        return std::tie(b.duplicate_count, a.earliest_submission, a.normalized_text) <
               std::tie(a.duplicate_count, b.earliest_submission, b.normalized_text);
    });
    return groups;
}

std::vector<MapVariant> rank_identifier_maps(const UniqueProgram& group) {
    std::map<IdentifierMap, std::size_t> counts;
    for (const IdentifierMap& m : group.identifier_maps) ++counts[m];

    std::vector<std::pair<std::string, MapVariant>> keyed;
    keyed.reserve(counts.size());
    for (auto& [map, count] : counts) keyed.push_back({serialize_map(map), MapVariant{map, count}});
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.second.count != b.second.count) return a.second.count > b.second.count;
        return a.first < b.first;
    });

    std::vector<MapVariant> out;
    out.reserve(keyed.size());
    for (auto& [key, variant] : keyed) out.push_back(std::move(variant));
    return out;
}

std::vector<RankedSuggestion> suggest(const std::string& problem_id, const std::vector<UniqueProgram>& groups,
                                      std::size_t k, std::size_t m) {
    if (k < 1 || m < 1) throw std::invalid_argument("top-k and top-m must be at least 1");
    if (groups.empty()) throw EmptyProblem(problem_id);

    std::size_t total = 0;
    for (const UniqueProgram& g : groups) total += g.duplicate_count;

    auto ranked = rank_programs(groups);
    std::vector<RankedSuggestion> out;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        const UniqueProgram& g = ranked[i];
        RankedSuggestion s;
        s.rank = i + 1;
        s.normalized_text = g.normalized_text;
        s.duplicate_count = g.duplicate_count;
        s.coverage_share = total ? static_cast<double>(g.duplicate_count) / static_cast<double>(total) : 0.0;
        s.member_ids = g.member_ids;
        auto variants = rank_identifier_maps(g);
        // Baseline groups carry no maps; their text is already original.
        s.program_text = variants.empty() ? g.normalized_text
                                          : restore_identifiers(g.normalized_text, variants.front().map);
        if (variants.size() > m) variants.resize(m);
        s.identifier_variants = std::move(variants);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace refsol
