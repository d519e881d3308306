#include "refsol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace refsol {

namespace {

std::string render_hundredths(std::uint64_t hundredths) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%llu.%02llu%%", static_cast<unsigned long long>(hundredths / 100),
                  static_cast<unsigned long long>(hundredths % 100));
    return buf;
}

}  // namespace

std::string Fraction::percent() const {
    if (denominator == 0) throw DomainError("zero denominator");
    if (numerator > std::numeric_limits<std::uint64_t>::max() / 10000) throw DomainError("fraction too large");
    std::uint64_t scaled = numerator * 10000;
    std::uint64_t q = scaled / denominator;
    std::uint64_t r = scaled % denominator;
    // Compare 2r with d without overflow.
    if (r > denominator - r || (r == denominator - r && q % 2 == 1)) ++q;
    return render_hundredths(q);
}

bool operator==(const Fraction& a, const Fraction& b) {
    std::uint64_t ga = std::gcd(a.numerator, a.denominator);
    std::uint64_t gb = std::gcd(b.numerator, b.denominator);
    if (ga == 0 || gb == 0) return ga == gb;
    return a.numerator / ga == b.numerator / gb && a.denominator / ga == b.denominator / gb;
}

std::string percent(double ratio) {
    if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw DomainError("ratio out of range");
    double scaled = ratio * 10000.0;
    double rounded = std::nearbyint(scaled);  // default mode rounds half to even
    return render_hundredths(static_cast<std::uint64_t>(rounded));
}

Fraction unique_ratio(std::uint64_t n_unique, std::uint64_t n_solutions) {
    if (n_solutions == 0) throw DomainError("unique ratio of an empty problem");
    if (n_unique < 1 || n_unique > n_solutions) throw DomainError("unique count out of range");
    return Fraction{n_unique, n_solutions};
}

Fraction top_n_coverage(std::span<const std::size_t> ranked_counts, std::size_t n) {
    if (ranked_counts.empty()) throw DomainError("coverage of empty ranking");
    if (!std::is_sorted(ranked_counts.begin(), ranked_counts.end(), std::greater<>())) {
        throw DomainError("counts must be sorted in descending order");
    }
    std::uint64_t total = std::accumulate(ranked_counts.begin(), ranked_counts.end(), std::uint64_t{0});
    if (total == 0) throw DomainError("coverage with zero solutions");
    std::size_t take = std::min(n, ranked_counts.size());
    std::uint64_t covered =
        std::accumulate(ranked_counts.begin(), ranked_counts.begin() + static_cast<std::ptrdiff_t>(take),
                        std::uint64_t{0});
    return Fraction{covered, total};
}

ProblemReport make_report(std::string problem_id, std::span<const std::size_t> ranked_counts,
                          std::size_t n_unique_baseline, std::size_t n_outliers) {
    ProblemReport r;
    r.problem_id = std::move(problem_id);
    r.n_solutions = std::accumulate(ranked_counts.begin(), ranked_counts.end(), std::size_t{0});
    r.n_unique = ranked_counts.size();
    r.n_unique_baseline = n_unique_baseline;
    r.n_outliers = n_outliers;
    r.unique_ratio = unique_ratio(r.n_unique, r.n_solutions);
    r.baseline_ratio = unique_ratio(n_unique_baseline, r.n_solutions);
    for (std::size_t n = 1; n <= r.n_unique; ++n) r.coverage_curve.emplace_back(n, top_n_coverage(ranked_counts, n));
    return r;
}

double mean_over_problems(std::span<const ProblemReport> reports, const ReportField& field) {
    if (reports.empty()) throw DomainError("mean over no problems");
    long double sum = 0;
    for (const ProblemReport& r : reports) sum += field(r);
    return static_cast<double>(sum / static_cast<long double>(reports.size()));
}

double mean_coverage_at(std::span<const ProblemReport> reports, std::size_t n) {
    return mean_over_problems(reports, [n](const ProblemReport& r) {
        if (n == 0) return 0.0;
        if (n > r.coverage_curve.size()) return 1.0;
        return r.coverage_curve[n - 1].second.value();
    });
}

}  // namespace refsol
