#include "refsol/pipeline.hpp"

#include "refsol/ranking.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace refsol {

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

ProblemResult process_problem(const std::string& problem_id, std::span<const Submission> submissions) {
    ProblemResult result;
    result.problem_id = problem_id;
    result.submissions.assign(submissions.begin(), submissions.end());
    std::vector<Submission> normalized_subs;
    for (const Submission& s : submissions) {
        try {
            result.programs.push_back(normalize(s.source, s.id));
            normalized_subs.push_back(s);
        } catch (const OutlierError& e) {
            result.outliers.push_back({s.id, e.what()});
        }
    }
    result.groups = rank_programs(deduplicate(result.programs, normalized_subs));
    result.baseline_groups = rank_programs(baseline_deduplicate(normalized_subs));
    if (!result.groups.empty()) {
        std::vector<std::size_t> counts;
        for (const UniqueProgram& g : result.groups) counts.push_back(g.duplicate_count);
        result.report = make_report(problem_id, counts, result.baseline_groups.size(), result.outliers.size());
    }
    return result;
}

std::vector<ProblemResult> process_all(const ProblemGroups& groups, std::size_t jobs) {
    std::vector<const std::pair<const std::string, std::vector<Submission>>*> items;
    for (const auto& entry : groups) items.push_back(&entry);
    std::vector<ProblemResult> results(items.size());
    parallel_for(items.size(), jobs, [&](std::size_t i) {
        results[i] = process_problem(items[i]->first, items[i]->second);
    });
    return results;
}

}  // namespace refsol
