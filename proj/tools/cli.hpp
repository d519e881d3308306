#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace refsol::cli {

struct RunConfig {
    std::filesystem::path corpus_root;
    std::string language = "Python3";
    std::size_t top_k = 5;
    std::size_t top_m = 3;
    std::filesystem::path output_dir = "refsol-out";
    std::size_t parallelism = 1;
    std::int64_t timeout_ms = 2000;
    bool verify = false;
    bool baseline = false;
};

/// Applies `key = value` lines (blank lines and `#` comments ignored).
/// Throws std::runtime_error on unknown keys or bad values.
void apply_config_text(RunConfig& config, const std::string& text);

/// Exit codes: 0 success, 1 operational error, 2 empty input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace refsol::cli
