#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace refsol {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Exact non-negative rational.
struct Fraction {
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 1;

    double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
    /// Percent with two decimals, rounded half to even: 81/10699 -> "0.76%".
    std::string percent() const;

    /// Value equality: 1/2 == 2/4.
    friend bool operator==(const Fraction& a, const Fraction& b);
};

/// Renders a real-valued ratio the same way Fraction::percent does.
std::string percent(double ratio);

Fraction unique_ratio(std::uint64_t n_unique, std::uint64_t n_solutions);

/// Sum of the first min(n, size) counts over the sum of all counts.
Fraction top_n_coverage(std::span<const std::size_t> ranked_counts, std::size_t n);

struct ProblemReport {
    std::string problem_id;
    std::size_t n_solutions = 0;
    std::size_t n_unique = 0;
    std::size_t n_unique_baseline = 0;
    Fraction unique_ratio;
    Fraction baseline_ratio;
    std::vector<std::pair<std::size_t, Fraction>> coverage_curve;  // n = 1..n_unique
    std::size_t n_outliers = 0;
};

/// Builds a report from ranked duplicate counts of both dedup variants.
ProblemReport make_report(std::string problem_id, std::span<const std::size_t> ranked_counts,
                          std::size_t n_unique_baseline, std::size_t n_outliers);

using ReportField = std::function<double(const ProblemReport&)>;

/// Unweighted mean of a per-problem value.
double mean_over_problems(std::span<const ProblemReport> reports, const ReportField& field);

/// Mean coverage at top-n across problems; a problem with fewer than n
/// unique programs contributes 1.0.
double mean_coverage_at(std::span<const ProblemReport> reports, std::size_t n);

}  // namespace refsol
