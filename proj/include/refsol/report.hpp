#pragma once

#include "refsol/pipeline.hpp"
#include "refsol/ranking.hpp"
#include "refsol/verify.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace refsol {

/// One JSON object per line: every normalized program, then every outlier.
std::string normalized_jsonl(const ProblemResult& result);

/// `{"problem_id": ..., "unique_programs": [...]}`.
std::string unique_programs_json(const std::string& problem_id, const std::vector<UniqueProgram>& groups);

/// `verdicts`, when given, holds one entry per suggestion.
std::string suggestions_json(const std::string& problem_id, const std::vector<RankedSuggestion>& suggestions,
                             const std::vector<EquivalenceVerdict>* verdicts = nullptr);
std::string suggestions_markdown(const std::string& problem_id, const std::vector<RankedSuggestion>& suggestions,
                                 const std::vector<EquivalenceVerdict>* verdicts = nullptr);

/// problem_id,n_solutions,baseline_unique,baseline_ratio,ours_unique,ours_ratio,outliers
/// followed by a Mean row of per-problem means.
std::string stats_csv(std::span<const ProblemReport> reports);

/// problem_id,n,coverage for every problem, then Mean rows up to the
/// largest unique count.
std::string coverage_csv(std::span<const ProblemReport> reports);

/// problem_id,submission_id,reason
std::string outliers_csv(std::span<const ProblemResult> results);

/// Quotes a CSV field when needed.
std::string csv_field(const std::string& value);

}  // namespace refsol
