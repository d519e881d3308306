#pragma once

#include "refsol/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace refsol::testing {

std::filesystem::path fixtures_dir();
std::filesystem::path fixture_corpus();

/// Every .py file under the fixture corpus, sorted by path.
std::vector<std::filesystem::path> fixture_programs();

std::string read_text(const std::filesystem::path& path);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct SyntheticProgram {
    Submission submission;
    std::string truth;  // generator label; equal labels mean same program modulo disguise
};

/// Random problem of `size` programs built from a few templates, each
/// disguised with fresh identifiers, comments, docstrings and spacing.
std::vector<SyntheticProgram> synthetic_problem(std::uint64_t seed, std::size_t size);

}  // namespace refsol::testing
