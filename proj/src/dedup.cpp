#include "refsol/dedup.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace refsol {

namespace {

// Digest buckets with full-text comparison inside each bucket.
class Grouper {
public:
    explicit Grouper(std::vector<UniqueProgram>& groups) : groups_(groups) {
        for (std::size_t i = 0; i < groups_.size(); ++i) {
            buckets_[digest(groups_[i].normalized_text)].push_back(i);
        }
    }

    UniqueProgram& find_or_add(const std::string& text, std::int64_t timestamp) {
        auto& bucket = buckets_[digest(text)];
        for (std::size_t idx : bucket) {
            if (groups_[idx].normalized_text == text) return groups_[idx];
        }
        bucket.push_back(groups_.size());
        UniqueProgram& g = groups_.emplace_back();
        g.normalized_text = text;
        g.earliest_submission = timestamp;
        return g;
    }

private:
    static std::size_t digest(const std::string& text) { return std::hash<std::string>{}(text); }

    std::vector<UniqueProgram>& groups_;
    std::unordered_map<std::size_t, std::vector<std::size_t>> buckets_;
};

void add_member(UniqueProgram& g, const std::string& id, std::int64_t ts, const IdentifierMap* map) {
    if (g.duplicate_count == 0 || ts < g.earliest_submission) g.earliest_submission = ts;
    ++g.duplicate_count;
    g.member_ids.push_back(id);
    if (map) g.identifier_maps.push_back(*map);
}

}  // namespace

std::vector<UniqueProgram> deduplicate(std::span<const NormalizedProgram> programs,
                                       std::span<const Submission> submissions) {
    std::unordered_map<std::string_view, std::int64_t> timestamps;
    for (const Submission& s : submissions) timestamps.emplace(s.id, s.submitted_at);

    std::vector<UniqueProgram> groups;
    Grouper grouper(groups);
    for (const NormalizedProgram& p : programs) {
        auto it = timestamps.find(p.submission_id);
        std::int64_t ts = it == timestamps.end() ? 0 : it->second;
        add_member(grouper.find_or_add(p.text, ts), p.submission_id, ts, &p.map);
    }
    return groups;
}

std::vector<UniqueProgram> baseline_deduplicate(std::span<const Submission> submissions) {
    std::vector<UniqueProgram> groups;
    Grouper grouper(groups);
    for (const Submission& s : submissions) {
        add_member(grouper.find_or_add(s.source, s.submitted_at), s.id, s.submitted_at, nullptr);
    }
    return groups;
}

std::vector<UniqueProgram> merge_groups(std::vector<UniqueProgram> left,
                                        const std::vector<UniqueProgram>& right) {
    Grouper grouper(left);
    for (const UniqueProgram& r : right) {
        UniqueProgram& g = grouper.find_or_add(r.normalized_text, r.earliest_submission);
        if (g.duplicate_count == 0 || r.earliest_submission < g.earliest_submission) {
            g.earliest_submission = r.earliest_submission;
        }
        g.duplicate_count += r.duplicate_count;
        g.member_ids.insert(g.member_ids.end(), r.member_ids.begin(), r.member_ids.end());
        g.identifier_maps.insert(g.identifier_maps.end(), r.identifier_maps.begin(),
                                 r.identifier_maps.end());
    }
    return left;
}

}  // namespace refsol
