#pragma once

#include "refsol/dedup.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace refsol {

struct MapVariant {
    IdentifierMap map;
    std::size_t count = 0;
};

struct RankedSuggestion {
    std::size_t rank = 0;  // 1-based
    std::string program_text;
    std::string normalized_text;
    std::size_t duplicate_count = 0;
    std::vector<MapVariant> identifier_variants;
    double coverage_share = 0.0;
    std::vector<std::string> member_ids;
};

class EmptyProblem : public std::runtime_error {
public:
    explicit EmptyProblem(const std::string& problem_id)
        : std::runtime_error("problem " + problem_id + " has no unique programs"), problem_id_(problem_id) {}
    const std::string& problem_id() const { return problem_id_; }

private:
    std::string problem_id_;
};

/// Descending duplicate_count, then earlier earliest_submission, then
/// lexicographic normalized_text.
std::vector<UniqueProgram> rank_programs(std::vector<UniqueProgram> groups);

/// Whole-map popularity: two maps count together only if every entry is
/// equal. Ties are ordered by the serialized map.
std::vector<MapVariant> rank_identifier_maps(const UniqueProgram& group);

/// Top-k programs (k clamped to the group count), each with its top-m maps
/// and its text restored with the most popular map.
std::vector<RankedSuggestion> suggest(const std::string& problem_id, const std::vector<UniqueProgram>& groups,
                                      std::size_t k, std::size_t m);

/// `[["VAR01","x"],...]`, the serialized form used in reports.
std::string serialize_map(const IdentifierMap& map);

}  // namespace refsol
