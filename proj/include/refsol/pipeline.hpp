#pragma once

#include "refsol/corpus.hpp"
#include "refsol/dedup.hpp"
#include "refsol/metrics.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace refsol {

struct Outlier {
    std::string submission_id;
    std::string reason;
};

struct ProblemResult {
    std::string problem_id;
    std::vector<Submission> submissions;       // valid inputs, time order
    std::vector<NormalizedProgram> programs;   // successful normalizations, same order
    std::vector<Outlier> outliers;
    std::vector<UniqueProgram> groups;           // ranked
    std::vector<UniqueProgram> baseline_groups;  // ranked, outliers excluded
    std::optional<ProblemReport> report;         // empty when every submission is an outlier
};

ProblemResult process_problem(const std::string& problem_id, std::span<const Submission> submissions);

/// Runs process_problem for every problem on `jobs` worker threads. The
/// result order follows the problem order of `groups`.
std::vector<ProblemResult> process_all(const ProblemGroups& groups, std::size_t jobs);

/// Calls fn(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace refsol
