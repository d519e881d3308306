#pragma once

#include "refsol/corpus.hpp"
#include "refsol/normalizer.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace refsol {

struct UniqueProgram {
    std::string normalized_text;
    std::size_t duplicate_count = 0;
    std::vector<std::string> member_ids;
    std::vector<IdentifierMap> identifier_maps;  // one per member, same order
    std::int64_t earliest_submission = 0;
};

/// Groups programs whose normalized text is byte-equal. Groups appear in
/// order of their first member; members keep input order. Submission
/// timestamps come from `submissions`, matched by id (0 when absent).
std::vector<UniqueProgram> deduplicate(std::span<const NormalizedProgram> programs,
                                       std::span<const Submission> submissions);

/// Exact match on raw source, no normalization. Maps stay empty.
std::vector<UniqueProgram> baseline_deduplicate(std::span<const Submission> submissions);

/// Merges two partial groupings of disjoint shards. Associative and
/// commutative up to group order.
std::vector<UniqueProgram> merge_groups(std::vector<UniqueProgram> left,
                                        const std::vector<UniqueProgram>& right);

}  // namespace refsol
